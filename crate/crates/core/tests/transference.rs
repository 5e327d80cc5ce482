use expapprox::harness::Fixture;
use expapprox::numerics::{Envelope, QuadratureConfig, RealFunction};
use expapprox::steklov::{iterated_difference, mollify, steklov_mean, Mollifier, SteklovParams};
use expapprox::transference::{transfer_derivative_check, transfer_functional, transfer_sup, DualWitness, UGrid};
use expapprox::weights::{extremal_dual, weighted_norm, Weight, WeightedSpaceParams};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn l2() -> WeightedSpaceParams {
    WeightedSpaceParams::unweighted(2.0).unwrap()
}

fn fx(name: &str) -> RealFunction {
    Fixture::by_name(name).unwrap().f
}

fn box_() -> RealFunction {
    RealFunction::new("box", Envelope::compact(-1.0, 1.0), |x| if x.abs() <= 1.0 { 1.0 } else { 0.0 }).with_breakpoints(vec![-1.0, 1.0])
}

/// Gauss-Legendre 8-point rule on `[a, b]`.
fn gl8(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    X.iter().zip(W).map(|(x, w)| w * (g(m - h * x) + g(m + h * x))).sum::<f64>() * h
}

#[test]
fn functional_examples() {
    let w = DualWitness::unnormalized(box_(), l2(), &cfg()).unwrap();
    assert!((w.norm_pprime - 2f64.sqrt()).abs() < 1e-12);
    assert!(DualWitness::new(box_(), l2(), &cfg()).is_err());
    let f0 = transfer_functional(&box_(), &w, 0.0, &cfg()).unwrap();
    assert!((f0 - 1.75).abs() < 1e-10, "{f0}");
    assert_eq!(transfer_functional(&box_(), &w, 10.0, &cfg()).unwrap(), 0.0);
}

// F_f(0) >= ‖f‖ does not hold with the extremal witness: for χ_[0,1] in L²,
// S_{1,0}χ is the tent 1 − |x − 1/2| on [0,1] and F(0) = 3/4.
#[test]
fn extremal_witness_counterexample_is_pinned() {
    let ind = fx("indicator");
    let w = extremal_dual(&ind, &l2(), &cfg()).unwrap();
    let f0 = transfer_functional(&ind, &w, 0.0, &cfg()).unwrap();
    assert!((f0 - 0.75).abs() < 1e-10);
    let s = transfer_sup(&ind, &l2(), &UGrid::covering(4.0), &cfg()).unwrap();
    assert!((s - 0.75).abs() < 1e-10);
    assert!(s < weighted_norm(&ind, &l2(), &cfg()).unwrap());
}

#[test]
fn sup_examples() {
    let grid = UGrid::covering(4.0);
    assert!(grid.points().len() >= 161);
    assert_eq!(transfer_sup(&RealFunction::zero(), &l2(), &grid, &cfg()).unwrap(), 0.0);

    let l1 = WeightedSpaceParams::unweighted(1.0).unwrap();
    let g = fx("gaussian");
    let n = weighted_norm(&g, &l1, &cfg()).unwrap();
    let s = transfer_sup(&g, &l1, &grid, &cfg()).unwrap();
    assert!(s >= n * (1.0 - 1e-8) && s <= 27.0 * n, "{s} vs {n}");
}

#[test]
fn derivative_examples() {
    let bump = fx("bump");
    let w = extremal_dual(&bump, &l2(), &cfg()).unwrap();
    assert!(transfer_derivative_check(&bump, &w, 1, 0.0, &cfg()).unwrap().pass);

    let zero = RealFunction::zero().with_derivatives(vec![RealFunction::zero()]);
    let r = transfer_derivative_check(&zero, &w, 1, 0.0, &cfg()).unwrap();
    assert!(r.pass && r.lhs == 0.0);

    let g = fx("gaussian");
    let w = extremal_dual(&g, &l2(), &cfg()).unwrap();
    for k in [1, 2] {
        let r = transfer_derivative_check(&g, &w, k, 0.5, &cfg()).unwrap();
        assert!(r.pass, "k={k}: {r:?}");
    }
    let f2 = g.derivative(2).unwrap();
    for x in [-1.3, 0.0, 0.7] {
        assert!((f2.eval(x).unwrap() - (4.0 * x * x - 2.0) * (-x * x).exp()).abs() < 1e-14);
    }
    assert!(transfer_derivative_check(&fx("indicator"), &w, 1, 0.0, &cfg()).is_err());
}

#[test]
fn composition_with_one_sided_average() {
    let f = fx("gaussian");
    let w = extremal_dual(&f, &l2(), &cfg()).unwrap();
    let h = 0.5;
    let d = iterated_difference(&f, h, 1, &cfg()).unwrap();
    let ff = |u: f64| transfer_functional(&f, &w, u, &cfg()).unwrap();
    for u in [-1.0, 0.0, 0.7] {
        let lhs = transfer_functional(&d, &w, u, &cfg()).unwrap();
        let rhs = ff(u) - gl8(ff, u, u + h) / h;
        assert!((lhs - rhs).abs() < 1e-7, "u={u}: {lhs} vs {rhs}");
    }
}

#[test]
fn composition_with_steklov_mean() {
    let f = fx("bump");
    let w = extremal_dual(&fx("gaussian"), &l2(), &cfg()).unwrap();
    let ff = |u: f64| transfer_functional(&f, &w, u, &cfg()).unwrap();
    for (lambda, tau) in [(1.0, 0.3), (4.0, -1.0)] {
        let s = steklov_mean(&f, SteklovParams::new(lambda, tau).unwrap(), &cfg()).unwrap();
        for u in [-0.5, 0.25] {
            let lhs = transfer_functional(&s, &w, u, &cfg()).unwrap();
            let c = u + tau;
            let r = 0.5 / lambda;
            // F_f is piecewise smooth; split at the midpoint for the fixed rule
            let rhs = lambda * (gl8(ff, c - r, c) + gl8(ff, c, c + r));
            assert!((lhs - rhs).abs() < 1e-6, "lambda={lambda} u={u}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn composition_with_mollifier() {
    let f = fx("gaussian");
    let w = extremal_dual(&fx("bump"), &l2(), &cfg()).unwrap();
    let t = 0.5;
    let m = Mollifier::uniform(t).unwrap();
    let conv = mollify(&f, &m, &cfg()).unwrap();
    let ff = |u: f64| transfer_functional(&f, &w, u, &cfg()).unwrap();
    for u in [0.0, 0.6] {
        let lhs = transfer_functional(&conv, &w, u, &cfg()).unwrap();
        let rhs = gl8(|v| ff(u - v), -t / 2.0, t / 2.0) / t;
        assert!((lhs - rhs).abs() < 1e-8, "u={u}: {lhs} vs {rhs}");
    }
}

#[test]
fn functional_is_bounded() {
    for wname in ["const:1", "power:0.5"] {
        let sp = WeightedSpaceParams::new(2.0, Weight::parse(wname).unwrap()).unwrap();
        let c1 = sp.c1().unwrap();
        for name in ["gaussian", "indicator", "exponential"] {
            let f = fx(name);
            let w = extremal_dual(&f, &sp, &cfg()).unwrap();
            let n = weighted_norm(&f, &sp, &cfg()).unwrap();
            for i in -8..=8 {
                let v = transfer_functional(&f, &w, i as f64 * 0.5, &cfg()).unwrap();
                assert!(v.abs() <= c1 * n, "{name} {wname}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn functional_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, u in -3.0f64..3.0) {
        let (f, g) = (fx("gaussian"), fx("indicator"));
        let w = extremal_dual(&fx("exponential"), &l2(), &cfg()).unwrap();
        let h = RealFunction::combination(&[(a, f.clone()), (b, g.clone())]);
        let lhs = transfer_functional(&h, &w, u, &cfg()).unwrap();
        let rhs = a * transfer_functional(&f, &w, u, &cfg()).unwrap() + b * transfer_functional(&g, &w, u, &cfg()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}
