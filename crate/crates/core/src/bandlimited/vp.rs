use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{integrate_line, Envelope, QuadratureConfig, RealFunction};

/// `ϑ(x) = (2/π) sin(x/2) sin(3x/2) / x²`.
pub fn vp_kernel(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        return (2.0 / PI) * (0.75 - 5.0 * x * x / 16.0);
    }
    (2.0 / PI) * (0.5 * x).sin() * (1.5 * x).sin() / (x * x)
}

/// `sup |ϑ|`.
const THETA_SUP: f64 = 3.0 / (2.0 * PI);
/// Upper bound for `‖ϑ‖₁` (numerically 1.4360).
const THETA_L1: f64 = 1.5;

/// Envelope of the integrand `t ↦ f(t) σ ϑ(σ(x − t))` for a fixed `x`.
fn inner_envelope(f_env: &Envelope, sigma: f64, x: f64, cfg: &QuadratureConfig) -> Envelope {
    let flat = f_env.scaled(THETA_SUP * sigma);
    if matches!(f_env, Envelope::Compact { .. }) {
        return flat;
    }
    // |t| >= 2|x| gives |σϑ(σ(x−t))| <= 8 / (π σ t²)
    let decayed = match f_env.times_power(-2.0, 8.0 / (PI * sigma)) {
        Envelope::Polynomial { power, scale, from } => Envelope::Polynomial {
            power,
            scale,
            from: from.max(2.0 * x.abs()),
        },
        e => e,
    };
    let r = cfg.truncation_radius.max(2.0 * x.abs());
    let t_flat = flat.tail_bound(r.max(flat.valid_from())).unwrap_or(f64::INFINITY);
    let t_dec = decayed.tail_bound(r.max(decayed.valid_from())).unwrap_or(f64::INFINITY);
    if t_dec < t_flat {
        decayed
    } else {
        flat
    }
}

/// Decay envelope of `J(f, σ)`.
fn output_envelope(f: &RealFunction, sigma: f64, cfg: &QuadratureConfig) -> Result<Envelope> {
    let env = f.envelope();
    if let Envelope::Compact { .. } = env {
        let r = env.valid_from();
        let l1 = integrate_line(|t| Ok(f.eval(t)?.abs()), env, &cfg.with_singular_points(f.breakpoints()))?;
        return Ok(Envelope::polynomial(2.0, 8.0 * (l1.value + l1.err_estimate) / (PI * sigma), (2.0 * r).max(1.0)));
    }
    let from = env.valid_from().max(1.0);
    // sup_{|t| >= |x|/2} |f(t)| as a function of x
    let dilated = env.with_min_from(from).dilate2().scaled(THETA_L1);
    let near_cfg = cfg.with_singular_points(f.breakpoints());
    let core = crate::numerics::integrate_interval(|t| Ok(f.eval(t)?.abs()), -from, from, &near_cfg)?;
    let core = core.value + core.err_estimate;
    match *env {
        Envelope::Polynomial { power, scale, .. } if power <= 1.0 => {
            if power < 1.0 {
                return Ok(Envelope::Unbounded);
            }
            // ∫_{|t|<=R} |f| <= core + 2 s ln(R/from), and ln(x/(2 from))/x <= 1/(2 e from)
            let x0 = 2.0 * from;
            let c = 8.0 * (core / x0 + scale / (std::f64::consts::E * from)) / (PI * sigma);
            Ok(Envelope::polynomial(1.0, c, x0).sum(&dilated))
        }
        _ => {
            let tail = env.tail_bound(from)?;
            let near = Envelope::polynomial(2.0, 8.0 * (core + tail) / (PI * sigma), 2.0 * from);
            Ok(near.sum(&dilated))
        }
    }
}

/// `J(f, σ)(x) = σ ∫ f(t) ϑ(σ(x − t)) dt`, evaluated on demand.
pub fn vp_approx(f: &RealFunction, sigma: f64, cfg: &QuadratureConfig) -> Result<RealFunction> {
    let env = output_envelope(f, sigma, cfg)?;
    let fe = f.evaluator();
    let f_env = f.envelope().clone();
    let icfg = cfg.with_singular_points(f.breakpoints());
    Ok(RealFunction::fallible(format!("J({},{sigma})", f.label()), env, move |x| {
        let ienv = inner_envelope(&f_env, sigma, x, &icfg);
        let v = integrate_line(|t| Ok(fe(t)? * sigma * vp_kernel(sigma * (x - t))), &ienv, &icfg)?;
        Ok(v.value)
    }))
}

/// `J(f, σ)` with derivatives `J(f^{(k)}, σ)` for every exact derivative of `f` up to `order`.
pub fn vp_approx_with_derivatives(f: &RealFunction, sigma: f64, order: usize, cfg: &QuadratureConfig) -> Result<RealFunction> {
    let base = vp_approx(f, sigma, cfg)?;
    let mut ds = Vec::new();
    for k in 1..=order.min(f.derivative_order()) {
        ds.push(vp_approx(&f.derivative(k).unwrap(), sigma, cfg)?);
    }
    Ok(base.with_derivatives(ds))
}
