use std::f64::consts::PI;

use expapprox::harness::Fixture;
use expapprox::numerics::{integrate_interval, integrate_line, Envelope, QuadratureConfig, RealFunction};
use expapprox::Error;
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn interval_examples() {
    let one = integrate_interval(|_| Ok(1.0), 0.0, 1.0, &cfg()).unwrap();
    assert!((one.value - 1.0).abs() < 1e-15);

    let c = cfg().with_singular_points(&[0.0]);
    let s = integrate_interval(|x: f64| Ok(x.abs().powf(-0.5)), -1.0, 1.0, &c).unwrap();
    assert!((s.value - 4.0).abs() <= 4.0 * 1e-8, "{}", s.value);

    let g = integrate_interval(|x: f64| Ok((-x * x).exp()), -6.0, 6.0, &cfg()).unwrap();
    assert!((g.value / PI.sqrt() - 1.0).abs() < 1e-8);
}

#[test]
fn line_examples() {
    let e = integrate_line(|x: f64| Ok((-x.abs()).exp()), &Envelope::exponential(1.0, 1.0), &cfg().with_singular_points(&[0.0])).unwrap();
    assert!((e.value - 2.0).abs() < 1e-8);

    let ind = integrate_line(|x: f64| Ok(if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }), &Envelope::compact(0.0, 1.0), &cfg()).unwrap();
    assert!((ind.value - 1.0).abs() < 1e-12);

    let cauchy = |c: &QuadratureConfig| integrate_line(|x: f64| Ok(1.0 / (1.0 + x * x)), &Envelope::polynomial(2.0, 1.0, 0.0), c).unwrap();
    // the default radius cap leaves a tail of 2/4096, which the error estimate carries
    let capped = cauchy(&cfg());
    assert!((capped.value - PI).abs() <= capped.err_estimate);
    let wide = cauchy(&QuadratureConfig { max_radius: 1e7, ..cfg() });
    assert!((wide.value / PI - 1.0).abs() < 1e-6, "{}", wide.value);
}

#[test]
fn divergent_polynomial_tail_is_an_error() {
    let r = integrate_line(|x: f64| Ok(1.0 / (1.0 + x.abs())), &Envelope::polynomial(1.0, 1.0, 0.0), &cfg());
    assert!(matches!(r, Err(Error::TailUnbounded { .. })));
}

#[test]
fn corpus_envelopes_and_derivatives() {
    let grid: Vec<f64> = (0..41).map(|i| -4.05 + 0.2 * i as f64).collect();
    for fx in Fixture::corpus() {
        let f = &fx.f;
        if let Envelope::Compact { lo, hi } = f.envelope() {
            for x in [lo - 0.5, hi + 0.5, lo - 3.0, hi + 3.0] {
                assert_eq!(f.eval(x).unwrap(), 0.0, "{} at {x}", fx.name);
            }
        }
        if fx.smooth {
            let d = f.derivative_discrepancy(&grid, 1e-4).unwrap();
            assert!(d < 1e-4, "{}: derivative discrepancy {d}", fx.name);
        }
        let v = integrate_line(|x| Ok(f.eval(x)?.abs()), f.envelope(), &cfg().with_singular_points(f.breakpoints())).unwrap();
        assert!(v.value.is_finite() && v.value > 0.0);
    }
}

fn fixture_fn(i: usize) -> RealFunction {
    Fixture::by_name(["gaussian", "bump", "indicator", "exponential"][i]).unwrap().f
}

fn line(f: &RealFunction) -> f64 {
    integrate_line(|x| f.eval(x), f.envelope(), &cfg().with_singular_points(f.breakpoints())).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn line_integral_is_linear(i in 0usize..4, j in 0usize..4, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (f, g) = (fixture_fn(i), fixture_fn(j));
        let h = RealFunction::combination(&[(a, f.clone()), (b, g.clone())]);
        let lhs = line(&h);
        let rhs = a * line(&f) + b * line(&g);
        prop_assert!((lhs - rhs).abs() <= 10.0 * 1e-8 * (lhs.abs() + rhs.abs()) + 1e-11, "{lhs} vs {rhs}");
    }

    #[test]
    fn compact_line_integral_is_translation_invariant(i in 1usize..3, c in -4.0f64..4.0) {
        let f = fixture_fn(i);
        let a = line(&f);
        let b = line(&f.translated(c));
        prop_assert!((a - b).abs() <= 10.0 * 1e-8 * a.abs() + 1e-12, "{a} vs {b}");
    }

    #[test]
    fn interval_integral_splits(i in 0usize..4, a in -5.0f64..0.0, m in 0.0f64..1.0, len in 0.1f64..6.0) {
        let f = fixture_fn(i);
        let c = a + len;
        let b = a + m * len;
        let q = cfg().with_singular_points(f.breakpoints());
        let g = |x: f64| f.eval(x);
        let whole = integrate_interval(g, a, c, &q).unwrap().value;
        let parts = integrate_interval(g, a, b, &q).unwrap().value + integrate_interval(g, b, c, &q).unwrap().value;
        prop_assert!((whole - parts).abs() <= 10.0 * 1e-8 * whole.abs() + 1e-11, "{whole} vs {parts}");
    }
}
