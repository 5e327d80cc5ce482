//! Translated Steklov means, the one-sided average `T_δ` and its B-spline
//! iterates, moduli of smoothness, the unit-partition averaging operator and
//! mollifiers.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{binomial, scaled_gaussian, integrate_interval, integrate_line, Envelope, QuadratureConfig, RealFunction};
use crate::weights::{weighted_norm, WeightedSpaceParams};

/// `S_{λ,τ} f(x) = λ ∫_{x+τ−1/(2λ)}^{x+τ+1/(2λ)} f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteklovParams {
    pub lambda: f64,
    pub tau: f64,
}

impl SteklovParams {
    pub fn new(lambda: f64, tau: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("Steklov rate must be positive, got {lambda}")));
        }
        Ok(SteklovParams { lambda, tau })
    }
}

fn with_points(cfg: &QuadratureConfig, pts: &[f64]) -> QuadratureConfig {
    let mut all: Vec<f64> = cfg.singular_points.iter().chain(pts).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    cfg.with_singular_points(&all)
}

pub fn steklov_mean(f: &RealFunction, sp: SteklovParams, cfg: &QuadratureConfig) -> Result<RealFunction> {
    let SteklovParams { lambda, tau } = sp;
    let h = 0.5 / lambda;
    let icfg = with_points(cfg, f.breakpoints());
    let fe = f.evaluator();
    let env = match *f.envelope() {
        Envelope::Compact { lo, hi } => Envelope::compact(lo - tau - h, hi - tau + h),
        ref e => e.widen(tau.abs() + h),
    };
    let bps = f.breakpoints().iter().flat_map(|b| [b - tau - h, b - tau + h]).collect();
    let ds = (1..=f.derivative_order())
        .map(|k| steklov_mean(&f.derivative(k).unwrap(), sp, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(RealFunction::fallible(format!("S[{lambda},{tau}]{}", f.label()), env, move |x| {
        let c = x + tau;
        Ok(lambda * integrate_interval(|t| fe(t), c - h, c + h, &icfg)?.value)
    })
    .with_breakpoints(bps)
    .with_derivatives(ds))
}

/// `T_δ f(x) = (1/δ) ∫_0^δ f(x+t) dt`.
pub fn steklov_average(f: &RealFunction, delta: f64, cfg: &QuadratureConfig) -> Result<RealFunction> {
    steklov_mean(f, SteklovParams::new(1.0 / delta, delta / 2.0)?, cfg)
}

/// Cardinal B-spline `M_j` of order `j` (degree `j−1`) supported on `[0, j]`.
pub fn bspline(j: usize, u: f64) -> f64 {
    if j == 0 || !(u > 0.0 && u < j as f64) {
        return 0.0;
    }
    let m = u.floor() as i64;
    // n[i] holds M_k(u − (m − i)) for the current order k
    let mut n = vec![0.0; j];
    n[0] = 1.0;
    for k in 2..=j {
        let kf = (k - 1) as f64;
        for i in (0..k).rev() {
            let s = (m - i as i64) as f64; // left knot of this piece
            let left = if i < k - 1 { (u - s) * n[i] } else { 0.0 };
            let right = if i > 0 { (s + k as f64 - u) * n[i - 1] } else { 0.0 };
            n[i] = (left + right) / kf;
        }
    }
    // M_j(u) corresponds to left knot 0, i.e. i = m
    if m >= 0 && (m as usize) < j {
        n[m as usize]
    } else {
        0.0
    }
}

/// `T_δ^j f(x) = ∫_0^j f(x + δu) M_j(u) du`.
pub fn t_iterate(f: &RealFunction, delta: f64, j: usize, cfg: &QuadratureConfig) -> Result<RealFunction> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {delta}")));
    }
    if j == 0 {
        return Ok(f.clone());
    }
    let fe = f.evaluator();
    let fb: Vec<f64> = f.breakpoints().to_vec();
    let span = j as f64 * delta;
    let env = match *f.envelope() {
        Envelope::Compact { lo, hi } => Envelope::compact(lo - span, hi),
        ref e => e.widen(span),
    };
    let bps = fb.iter().flat_map(|b| (0..=j).map(move |i| b - i as f64 * delta)).collect();
    let ds = (1..=f.derivative_order())
        .map(|k| t_iterate(&f.derivative(k).unwrap(), delta, j, cfg))
        .collect::<Result<Vec<_>>>()?;
    let base = cfg.clone();
    Ok(RealFunction::fallible(format!("T[{delta}]^{j}{}", f.label()), env, move |x| {
        let mut pts: Vec<f64> = (1..j).map(|i| i as f64).collect();
        pts.extend(fb.iter().map(|b| (b - x) / delta).filter(|u| *u > 0.0 && *u < j as f64));
        let icfg = with_points(&base, &pts);
        Ok(integrate_interval(|u| Ok(fe(x + delta * u)? * bspline(j, u)), 0.0, j as f64, &icfg)?.value)
    })
    .with_breakpoints(bps)
    .with_derivatives(ds))
}

/// `(I − T_δ)^r f = Σ_j (−1)^j C(r,j) T_δ^j f`.
pub fn iterated_difference(f: &RealFunction, delta: f64, r: usize, cfg: &QuadratureConfig) -> Result<RealFunction> {
    if r == 0 {
        return Err(Error::InvalidArgument("difference order must be at least 1".into()));
    }
    let mut terms = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((sign * binomial(r, j), t_iterate(f, delta, j, cfg)?));
    }
    Ok(RealFunction::combination(&terms).with_label(format!("(I-T[{delta}])^{r}{}", f.label())))
}

/// `Ω_r(f, δ)_{p,ϱ} = ‖(I − T_δ)^r f‖_{p,ϱ}`.
pub fn modulus(f: &RealFunction, delta: f64, r: usize, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<f64> {
    weighted_norm(&iterated_difference(f, delta, r, cfg)?, sp, cfg)
}

/// `T_Q f = Σ_U χ_U |U|^{-1} ∫_U |f|` over the cells `[k+offset, k+1+offset)` meeting `[-L, L]`.
pub fn averaging_operator(f: &RealFunction, offset: f64, cfg: &QuadratureConfig) -> Result<RealFunction> {
    let l = cfg.truncation_radius;
    let k0 = (-l - offset).floor() as i64;
    let k1 = (l - offset).ceil() as i64;
    let icfg = with_points(cfg, f.breakpoints());
    let mut vals = Vec::with_capacity((k1 - k0) as usize);
    for k in k0..k1 {
        let a = k as f64 + offset;
        vals.push(integrate_interval(|x| Ok(f.eval(x)?.abs()), a, a + 1.0, &icfg)?.value);
    }
    let lo = k0 as f64 + offset;
    let hi = k1 as f64 + offset;
    let bps = (k0..=k1).map(|k| k as f64 + offset).collect();
    let vals = Arc::new(vals);
    Ok(RealFunction::new(format!("TQ[{offset}]{}", f.label()), Envelope::compact(lo, hi), move |x| {
        if !(x >= lo && x < hi) {
            return 0.0;
        }
        let i = ((x - offset).floor() as i64 - k0) as usize;
        vals.get(i).copied().unwrap_or(0.0)
    })
    .with_breakpoints(bps))
}

/// A unit-mass kernel `φ` with its radial majorant norm `‖φ̃‖₁` and scale `t`.
#[derive(Clone, Debug)]
pub struct Mollifier {
    pub phi: RealFunction,
    pub radial_majorant_norm: f64,
    pub t: f64,
}

impl Mollifier {
    /// Checks `∫φ = 1` within 1e-8 and computes `‖φ̃‖₁` from a dense grid.
    pub fn new(phi: RealFunction, t: f64, cfg: &QuadratureConfig) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("mollifier scale must be positive, got {t}")));
        }
        let mass = integrate_line(|x| phi.eval(x), phi.envelope(), &cfg.with_singular_points(phi.breakpoints()))?;
        if (mass.value - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!("mollifier mass is {}, expected 1", mass.value)));
        }
        let norm = radial_majorant_norm(&phi, cfg)?;
        Ok(Mollifier {
            phi,
            radial_majorant_norm: norm,
            t,
        })
    }

    /// `(1 − |x|)⁺`.
    pub fn triangular(t: f64) -> Result<Self> {
        let phi = RealFunction::new("tri", Envelope::compact(-1.0, 1.0), |x| (1.0 - x.abs()).max(0.0))
            .with_breakpoints(vec![-1.0, 0.0, 1.0]);
        Self::new(phi, t, &QuadratureConfig::default())
    }

    /// `χ_{[-1/2, 1/2]}`.
    pub fn uniform(t: f64) -> Result<Self> {
        let phi = RealFunction::new("unif", Envelope::compact(-0.5, 0.5), |x| if x.abs() <= 0.5 { 1.0 } else { 0.0 })
            .with_breakpoints(vec![-0.5, 0.5]);
        Self::new(phi, t, &QuadratureConfig::default())
    }

    /// `e^{−x²}/√π` with exact derivatives up to order 3.
    pub fn gaussian(t: f64) -> Result<Self> {
        Self::new(scaled_gaussian(1.0 / PI.sqrt(), "gauss"), t, &QuadratureConfig::default())
    }

    pub fn with_scale(&self, t: f64) -> Self {
        Mollifier { t, ..self.clone() }
    }
}

/// `‖φ̃‖₁` with `φ̃(x) = sup_{|y| >= |x|} |φ(y)|`, by a reverse running max on a grid.
fn radial_majorant_norm(phi: &RealFunction, cfg: &QuadratureConfig) -> Result<f64> {
    let env = phi.envelope();
    let (r, tail) = match env {
        Envelope::Compact { .. } => (env.valid_from(), 0.0),
        _ => {
            let r = cfg.truncation_radius.max(env.valid_from());
            (r, env.tail_bound(r)?)
        }
    };
    let n = 200_000;
    let h = r / n as f64;
    let mut vals = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = i as f64 * h;
        vals.push(phi.eval(x)?.abs().max(phi.eval(-x)?.abs()));
    }
    let mut run: f64 = 0.0;
    let mut sum = 0.0;
    for v in vals.iter().rev().skip(1) {
        run = run.max(*v);
        sum += run * h;
    }
    Ok(2.0 * sum + tail)
}

/// `f ∗ φ_t`, evaluated as `∫ f(x − t v) φ(v) dv`.
pub fn mollify(f: &RealFunction, m: &Mollifier, cfg: &QuadratureConfig) -> Result<RealFunction> {
    convolve_scaled(f, &m.phi, m.t, 1.0, cfg, &format!("{}*phi[{}]", f.label(), m.t))
}

/// `(f ∗ φ_t)^{(k)} = t^{-k} f ∗ (φ^{(k)})_t`, using the kernel's exact derivatives.
pub fn mollify_derivative(f: &RealFunction, m: &Mollifier, k: usize, cfg: &QuadratureConfig) -> Result<RealFunction> {
    if k == 0 {
        return mollify(f, m, cfg);
    }
    if let Some(fk) = f.derivative(k) {
        return mollify(&fk, m, cfg);
    }
    let dk = m
        .phi
        .derivative(k)
        .ok_or_else(|| Error::InvalidArgument(format!("mollifier has no derivative of order {k}")))?;
    convolve_scaled(f, &dk, m.t, m.t.powi(-(k as i32)), cfg, &format!("({}*phi[{}])^({k})", f.label(), m.t))
}

fn convolve_scaled(f: &RealFunction, phi: &RealFunction, t: f64, factor: f64, cfg: &QuadratureConfig, label: &str) -> Result<RealFunction> {
    let env = match phi.envelope() {
        Envelope::Compact { .. } => match *f.envelope() {
            Envelope::Compact { lo, hi } => {
                let (plo, phi_hi) = match *phi.envelope() {
                    Envelope::Compact { lo, hi } => (lo, hi),
                    _ => unreachable!(),
                };
                Envelope::compact(lo + t * plo, hi + t * phi_hi)
            }
            ref e => e.widen(t * phi.envelope().valid_from()),
        },
        pe => {
            // |u| >= |x|/2: ‖f‖₁ sup φ_t(|x|/2); |u| < |x|/2: sup_{|y|>=|x|/2}|f| ‖φ‖₁
            let l1 = integrate_line(|x| Ok(f.eval(x)?.abs()), f.envelope(), &cfg.with_singular_points(f.breakpoints()));
            let phi1 = integrate_line(|x| Ok(phi.eval(x)?.abs()), pe, &cfg.with_singular_points(phi.breakpoints()))?;
            match l1 {
                Ok(l1) => {
                    let far = match pe.clone() {
                        Envelope::Gaussian { rate, scale, from } => Envelope::Gaussian {
                            rate: rate / (4.0 * t * t),
                            scale: scale / t * (l1.value + l1.err_estimate),
                            from: 2.0 * t * from,
                        },
                        Envelope::Exponential { rate, scale, from } => Envelope::Exponential {
                            rate: rate / (2.0 * t),
                            scale: scale / t * (l1.value + l1.err_estimate),
                            from: 2.0 * t * from,
                        },
                        Envelope::Polynomial { power, scale, from } => Envelope::Polynomial {
                            power,
                            scale: scale / t * (2.0 * t).powf(power) * (l1.value + l1.err_estimate),
                            from: 2.0 * t * from,
                        },
                        _ => Envelope::Unbounded,
                    };
                    f.envelope().dilate2().scaled(phi1.value + phi1.err_estimate).sum(&far)
                }
                Err(_) => Envelope::Unbounded,
            }
            .scaled(factor)
        }
    };
    let env = if matches!(phi.envelope(), Envelope::Compact { .. }) { env.scaled(factor) } else { env };
    let fe = f.evaluator();
    let pe = phi.evaluator();
    let fb = f.breakpoints().to_vec();
    let penv = phi.envelope().clone();
    let ppts = phi.breakpoints().to_vec();
    let base = cfg.clone();
    Ok(RealFunction::fallible(label.to_string(), env, move |x| {
        let mut pts = ppts.clone();
        pts.extend(fb.iter().map(|b| (x - b) / t));
        let icfg = with_points(&base, &pts);
        let v = integrate_line(|v| Ok(fe(x - t * v)? * pe(v)?), &penv, &icfg)?;
        Ok(factor * v.value)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bspline_low_orders() {
        assert_eq!(bspline(1, 0.5), 1.0);
        assert!((bspline(2, 0.5) - 0.5).abs() < 1e-15);
        assert!((bspline(2, 1.5) - 0.5).abs() < 1e-15);
        assert!((bspline(3, 1.5) - 0.75).abs() < 1e-15);
        assert!((bspline(4, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(bspline(3, 3.5), 0.0);
    }

    #[test]
    fn bspline_matches_truncated_powers() {
        for j in 1..=8usize {
            let fact: f64 = (1..j).map(|t| t as f64).product();
            for s in 1..40 {
                let u = s as f64 * j as f64 / 40.0;
                let mut v = 0.0;
                for i in 0..=j {
                    let d = u - i as f64;
                    if d > 0.0 {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        v += sign * binomial(j, i) * d.powi(j as i32 - 1);
                    }
                }
                v /= fact;
                assert!((bspline(j, u) - v).abs() < 1e-10, "j={j} u={u}");
            }
        }
    }

    #[test]
    fn bspline_has_unit_mass_for_high_order() {
        let cfg = QuadratureConfig::default().with_singular_points(&(1..18).map(|i| i as f64).collect::<Vec<_>>());
        let m = integrate_interval(|u| Ok(bspline(18, u)), 0.0, 18.0, &cfg).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
    }
}
