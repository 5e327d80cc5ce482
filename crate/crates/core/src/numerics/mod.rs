//! Quadrature backbone and the function type every operator consumes.

mod envelope;
mod function;
mod quadrature;

pub use envelope::Envelope;
pub use function::{EvalFn, RealFunction};
pub use quadrature::{integrate_interval, integrate_line, Integral, QuadratureConfig};

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// `c e^{−x²}` with exact derivatives up to order 3.
pub fn scaled_gaussian(c: f64, label: &str) -> RealFunction {
    use std::f64::consts::E;
    // d^k/dx^k e^{−x²} = (−1)^k H_k(x) e^{−x²}
    const HERMITE: [fn(f64) -> f64; 4] = [|_| 1.0, |x| -2.0 * x, |x| 4.0 * x * x - 2.0, |x| -8.0 * x * x * x + 12.0 * x];
    // bounds on sup |H_k(x)| e^{−x²/2}
    let sups = [1.0, 2.0 / E.sqrt(), 8.0 / E + 2.0, 8.0 * (3.0 / E).powf(1.5) + 12.0 / E.sqrt()];
    let make = |k: usize| {
        let h = HERMITE[k];
        let env = if k == 0 { Envelope::gaussian(1.0, c.abs()) } else { Envelope::gaussian(0.5, c.abs() * sups[k]) };
        let name = if k == 0 { label.to_string() } else { format!("{label}^({k})") };
        RealFunction::new(name, env, move |x| c * h(x) * (-x * x).exp())
    };
    make(0).with_derivatives((1..4).map(make).collect())
}
