use std::f64::consts::PI;

use expapprox::harness::Fixture;
use expapprox::numerics::{Envelope, QuadratureConfig, RealFunction};
use expapprox::steklov::{
    averaging_operator, bspline, iterated_difference, modulus, mollify, steklov_average, steklov_mean, t_iterate, Mollifier, SteklovParams,
};
use expapprox::weights::{weighted_norm, Weight, WeightedSpaceParams};
use proptest::prelude::*;
use statrs::function::erf::erf;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn sin() -> RealFunction {
    RealFunction::new("sin", Envelope::bounded(1.0), f64::sin)
}

fn identity() -> RealFunction {
    RealFunction::new("x", Envelope::Unbounded, |x| x)
}

fn plateau(c: f64) -> RealFunction {
    RealFunction::new("plateau", Envelope::compact(-20.0, 20.0), move |x| if x.abs() <= 20.0 { c } else { 0.0 }).with_breakpoints(vec![-20.0, 20.0])
}

fn gaussian() -> RealFunction {
    Fixture::by_name("gaussian").unwrap().f
}

fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `T_δ^j f(x)` as a `j`-fold nested Simpson rule over `[0, δ]^j`.
fn nested_t(f: &dyn Fn(f64) -> f64, x: f64, delta: f64, j: usize, n: usize) -> f64 {
    if j == 0 {
        return f(x);
    }
    simpson(&|s| nested_t(f, x + s, delta, j - 1, n), 0.0, delta, n) / delta
}

#[test]
fn steklov_mean_examples() {
    let c = steklov_mean(&plateau(2.5), SteklovParams::new(0.5, 3.0).unwrap(), &cfg()).unwrap();
    for x in [-10.0, 0.0, 7.0] {
        assert!((c.eval(x).unwrap() - 2.5).abs() < 1e-12);
    }
    for (lambda, tau) in [(1.0, 0.0), (0.25, -2.0), (8.0, 0.3)] {
        let s = steklov_mean(&identity(), SteklovParams::new(lambda, tau).unwrap(), &cfg()).unwrap();
        for x in [-3.0, 0.0, 1.7] {
            assert!((s.eval(x).unwrap() - (x + tau)).abs() < 1e-12);
        }
    }
    let s = steklov_mean(&sin(), SteklovParams::new(1.0, 0.0).unwrap(), &cfg()).unwrap();
    for x in [0.0, 1.0, PI] {
        let exact = (x - 0.5f64).cos() - (x + 0.5f64).cos();
        assert!((exact - 2.0 * 0.5f64.sin() * x.sin()).abs() < 1e-15);
        assert!((s.eval(x).unwrap() - exact).abs() < 1e-8);
    }
    assert!(SteklovParams::new(0.0, 1.0).is_err());
}

#[test]
fn steklov_average_examples() {
    for delta in [1.0, 0.5, 0.1] {
        let t = steklov_average(&identity(), delta, &cfg()).unwrap();
        let d = iterated_difference(&identity(), delta, 1, &cfg()).unwrap();
        let s = steklov_average(&sin(), delta, &cfg()).unwrap();
        let m = steklov_mean(&sin(), SteklovParams::new(1.0 / delta, delta / 2.0).unwrap(), &cfg()).unwrap();
        for x in [-2.0, 0.0, 0.4, 3.0] {
            assert!((t.eval(x).unwrap() - (x + delta / 2.0)).abs() < 1e-12);
            assert!((d.eval(x).unwrap() + delta / 2.0).abs() < 1e-12);
            let exact = 2.0 / delta * (delta / 2.0).sin() * (x + delta / 2.0).sin();
            assert!((s.eval(x).unwrap() - exact).abs() < 1e-9);
            assert_eq!(s.eval(x).unwrap(), m.eval(x).unwrap());
        }
        let z = steklov_average(&RealFunction::zero(), delta, &cfg()).unwrap();
        assert_eq!(z.eval(0.3).unwrap(), 0.0);
    }
}

#[test]
fn iterated_difference_examples() {
    let d = iterated_difference(&plateau(1.0), 0.5, 2, &cfg()).unwrap();
    for x in [-5.0, 0.0, 5.0] {
        assert!(d.eval(x).unwrap().abs() < 1e-12);
    }

    let g = |x: f64| (-x * x).exp();
    let t1 = nested_t(&g, 0.0, 0.5, 1, 400);
    let t2 = nested_t(&g, 0.0, 0.5, 2, 400);
    let oracle = g(0.0) - 2.0 * t1 + t2;
    // T_δ e^{-x²} in closed form
    let t1_exact = PI.sqrt() / (2.0 * 0.5) * erf(0.5);
    assert!((t1 - t1_exact).abs() < 1e-9, "{t1} {t1_exact}");
    let d = iterated_difference(&gaussian(), 0.5, 2, &cfg()).unwrap().eval(0.0).unwrap();
    assert!((d - oracle).abs() < 1e-7, "{d} vs {oracle}");
    const GOLDEN: f64 = -0.082_395_769_995_545;
    assert!((oracle - GOLDEN).abs() < 1e-10, "{oracle}");
}

#[test]
fn bspline_iterates_match_nested_quadrature() {
    let g = |x: f64| (-x * x).exp();
    for (x, delta, j) in [(0.3, 0.7, 3), (-1.1, 0.25, 4), (0.0, 1.0, 2)] {
        let t = t_iterate(&gaussian(), delta, j, &cfg()).unwrap().eval(x).unwrap();
        let o = nested_t(&g, x, delta, j, 24);
        assert!((t - o).abs() < 1e-6, "j={j}: {t} vs {o}");
    }
    let mass = simpson(&|u| bspline(5, u), 0.0, 5.0, 5000);
    assert!((mass - 1.0).abs() < 1e-10);
}

#[test]
fn modulus_examples() {
    let sp = WeightedSpaceParams::unweighted(2.0).unwrap();
    assert_eq!(modulus(&RealFunction::zero(), 0.1, 1, &sp, &cfg()).unwrap(), 0.0);

    // (I − T_δ) e^{-x²} with T_δ through erf
    let delta = 0.1;
    let diff = |x: f64| (-x * x).exp() - PI.sqrt() / (2.0 * delta) * (erf(x + delta) - erf(x));
    let oracle = simpson(&|x| diff(x).powi(2), -9.0, 9.0, 36_000).sqrt();
    const GOLDEN: f64 = 0.055_929_149_127_06;
    assert!((oracle - GOLDEN).abs() < 1e-9, "{oracle}");
    let m = modulus(&gaussian(), delta, 1, &sp, &cfg()).unwrap();
    assert!((m / GOLDEN - 1.0).abs() < 1e-7, "{m}");

    let (f, g) = (gaussian(), Fixture::by_name("bump").unwrap().f.translated(0.5));
    for r in [1, 2] {
        let lhs = modulus(&f.add(&g), 0.25, r, &sp, &cfg()).unwrap();
        let rhs = modulus(&f, 0.25, r, &sp, &cfg()).unwrap() + modulus(&g, 0.25, r, &sp, &cfg()).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-9));
    }
}

#[test]
fn modulus_is_bounded_by_norm() {
    for w in ["const:1", "power:0.5"] {
        let sp = WeightedSpaceParams::new(2.0, Weight::parse(w).unwrap()).unwrap();
        let c1 = sp.c1().unwrap();
        for fx in Fixture::corpus() {
            let n = weighted_norm(&fx.f, &sp, &cfg()).unwrap();
            for r in [1, 2] {
                let m = modulus(&fx.f, 0.5, r, &sp, &cfg()).unwrap();
                assert!(m <= 2f64.powi(r as i32) * c1 * n, "{} {w}", fx.name);
            }
        }
    }
}

#[test]
fn averaging_examples() {
    let ind = Fixture::by_name("indicator").unwrap().f;
    let a = averaging_operator(&ind, 0.0, &cfg()).unwrap();
    for (x, v) in [(-0.5, 0.0), (0.0, 1.0), (0.5, 1.0), (1.5, 0.0)] {
        assert!((a.eval(x).unwrap() - v).abs() < 1e-14);
    }

    let ramp = RealFunction::new("ramp", Envelope::compact(0.0, 1.0), |x| if (0.0..1.0).contains(&x) { x } else { 0.0 }).with_breakpoints(vec![0.0, 1.0]);
    let a = averaging_operator(&ramp, 0.0, &cfg()).unwrap();
    assert!((a.eval(0.2).unwrap() - 0.5).abs() < 1e-14);
    assert_eq!(a.eval(1.2).unwrap(), 0.0);

    let a = averaging_operator(&gaussian(), 0.0, &cfg()).unwrap();
    let expect = PI.sqrt() / 2.0 * erf(1.0);
    assert!((a.eval(0.5).unwrap() - expect).abs() < 1e-9);

    let shifted = averaging_operator(&gaussian(), 0.5, &cfg()).unwrap();
    assert!((shifted.eval(0.0).unwrap() - PI.sqrt() * erf(0.5)).abs() < 1e-9);
}

#[test]
fn mollifier_examples() {
    let m = Mollifier::gaussian(0.3).unwrap();
    assert!(m.radial_majorant_norm >= 1.0);
    let c = mollify(&plateau(-1.5), &m, &cfg()).unwrap();
    assert!((c.eval(0.0).unwrap() + 1.5).abs() < 1e-10);

    let delta = 0.4;
    let u = Mollifier::uniform(delta).unwrap();
    assert!((u.radial_majorant_norm - 1.0).abs() < 1e-4);
    let a = mollify(&gaussian(), &u, &cfg()).unwrap();
    let b = steklov_mean(&gaussian(), SteklovParams::new(1.0 / delta, 0.0).unwrap(), &cfg()).unwrap();
    for x in [-1.0, 0.0, 0.35, 2.0] {
        assert!((a.eval(x).unwrap() - b.eval(x).unwrap()).abs() < 1e-12);
    }

    // χ_[-1,1] ∗ φ_{1/2}, φ triangular: 1 inside [-1/2, 1/2], then 1 − 2(|x|−1/2)² on the
    // inner ramp, 2(3/2 − |x|)² on the outer ramp
    let box_ = RealFunction::new("box", Envelope::compact(-1.0, 1.0), |x| if x.abs() <= 1.0 { 1.0 } else { 0.0 }).with_breakpoints(vec![-1.0, 1.0]);
    let tri = Mollifier::triangular(0.5).unwrap();
    assert!((tri.radial_majorant_norm - 1.0).abs() < 1e-4);
    let v = mollify(&box_, &tri, &cfg()).unwrap();
    let ramp = |x: f64| {
        let a = x.abs();
        if a <= 0.5 {
            1.0
        } else if a <= 1.0 {
            1.0 - 2.0 * (a - 0.5).powi(2)
        } else if a <= 1.5 {
            2.0 * (1.5 - a).powi(2)
        } else {
            0.0
        }
    };
    for x in [0.0, 0.7, 1.0, 1.25, -1.4, 2.0] {
        assert!((v.eval(x).unwrap() - ramp(x)).abs() < 1e-10, "{x}");
    }
    assert!((v.eval(1.0).unwrap() - 0.5).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn steklov_mean_is_linear_and_positive(
        lambda in prop::sample::select(vec![0.25, 1.0, 8.0]),
        tau in -5.0f64..5.0,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in -4.0f64..4.0,
    ) {
        let sp = SteklovParams::new(lambda, tau).unwrap();
        let f = gaussian();
        let g = Fixture::by_name("indicator").unwrap().f;
        let s = |h: &RealFunction| steklov_mean(h, sp, &cfg()).unwrap().eval(x).unwrap();
        let lhs = s(&RealFunction::combination(&[(a, f.clone()), (b, g.clone())]));
        let rhs = a * s(&f) + b * s(&g);
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
        prop_assert!(s(&f) >= 0.0 && s(&g) >= 0.0);
    }

    #[test]
    fn steklov_mean_commutes_with_translation(
        lambda in prop::sample::select(vec![0.25, 1.0, 8.0]),
        tau in -5.0f64..5.0,
        c in -3.0f64..3.0,
        x in -4.0f64..4.0,
        name in prop::sample::select(vec!["gaussian", "bump", "indicator", "exponential"]),
    ) {
        let sp = SteklovParams::new(lambda, tau).unwrap();
        let f = Fixture::by_name(name).unwrap().f;
        let lhs = steklov_mean(&f.translated(c), sp, &cfg()).unwrap().eval(x).unwrap();
        let rhs = steklov_mean(&f, sp, &cfg()).unwrap().eval(x - c).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn t_iterate_agrees_with_repeated_average(delta in 0.1f64..1.0, x in -2.0f64..2.0) {
        let once = steklov_average(&gaussian(), delta, &cfg()).unwrap();
        let twice = steklov_average(&once, delta, &cfg()).unwrap().eval(x).unwrap();
        let spline = t_iterate(&gaussian(), delta, 2, &cfg()).unwrap().eval(x).unwrap();
        prop_assert!((twice - spline).abs() < 1e-9);
    }
}
