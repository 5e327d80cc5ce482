//! Muckenhoupt weights, A_p constants, weighted norms and duality witnesses.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, integrate_line, Envelope, Integral, QuadratureConfig, RealFunction};
use crate::report::{InequalityReport, ReportParams};

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    Constant(f64),
    /// `|x|^alpha`
    Power(f64),
    /// Piecewise-linear through `(grid[i], values[i])`, constant beyond the ends.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    kind: WeightKind,
}

impl Weight {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("constant weight must be positive, got {c}")));
        }
        Ok(Weight { kind: WeightKind::Constant(c) })
    }

    pub fn power(alpha: f64) -> Self {
        Weight { kind: WeightKind::Power(alpha) }
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let ok = grid.len() >= 2
            && grid.len() == values.len()
            && grid.windows(2).all(|w| w[1] > w[0])
            && values.iter().all(|v| *v > 0.0 && v.is_finite());
        if !ok {
            return Err(Error::InvalidArgument(
                "tabulated weight needs an increasing grid and positive values of equal length".into(),
            ));
        }
        Ok(Weight { kind: WeightKind::Tabulated { grid, values } })
    }

    /// Parses `const:c`, `power:alpha` or `tab:x0/v0,x1/v1,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad weight `{spec}`; expected const:<c>, power:<alpha> or tab:<x/v,...>"));
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "const" | "constant" => Weight::constant(arg.parse().map_err(|_| bad())?),
            "power" => {
                let a: f64 = arg.parse().map_err(|_| bad())?;
                if !a.is_finite() {
                    return Err(bad());
                }
                Ok(Weight::power(a))
            }
            "tab" => {
                let mut g = Vec::new();
                let mut v = Vec::new();
                for pair in arg.split(',') {
                    let (x, y) = pair.split_once('/').ok_or_else(bad)?;
                    g.push(x.parse().map_err(|_| bad())?);
                    v.push(y.parse().map_err(|_| bad())?);
                }
                Weight::tabulated(g, v)
            }
            _ => Err(bad()),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Constant(c) => format!("const:{c}"),
            WeightKind::Power(a) => format!("power:{a}"),
            WeightKind::Tabulated { grid, .. } => format!("tab:{}", grid.len()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Power(a) => {
                if *a == 0.0 {
                    1.0
                } else {
                    x.abs().powf(*a)
                }
            }
            WeightKind::Tabulated { grid, values } => {
                if x <= grid[0] {
                    return values[0];
                }
                if x >= grid[grid.len() - 1] {
                    return values[values.len() - 1];
                }
                let i = grid.partition_point(|g| *g <= x) - 1;
                let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    pub fn singular_points(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::Constant(_) => vec![],
            WeightKind::Power(a) if *a == 0.0 => vec![],
            WeightKind::Power(_) => vec![0.0],
            WeightKind::Tabulated { grid, .. } => grid.clone(),
        }
    }

    /// Envelope of `g * weight` given the envelope of `g`.
    pub fn weigh(&self, env: &Envelope) -> Envelope {
        match &self.kind {
            WeightKind::Constant(c) => env.scaled(*c),
            WeightKind::Power(a) => env.times_power(*a, 1.0),
            WeightKind::Tabulated { values, .. } => env.scaled(values.iter().cloned().fold(0.0, f64::max)),
        }
    }

    /// `∫_a^b ϱ^beta`, possibly `+∞`.
    pub fn integral_pow(&self, beta: f64, a: f64, b: f64) -> Result<f64> {
        match &self.kind {
            WeightKind::Constant(c) => Ok(c.powf(beta) * (b - a)),
            WeightKind::Power(alpha) => Ok(power_integral(alpha * beta, a, b)),
            WeightKind::Tabulated { grid, .. } => {
                let cfg = QuadratureConfig::default().with_singular_points(grid);
                Ok(integrate_interval(|x| Ok(self.eval(x).powf(beta)), a, b, &cfg)?.value)
            }
        }
    }
}

/// `∫_a^b |x|^gamma dx`.
fn power_integral(gamma: f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if gamma <= -1.0 && a <= 0.0 && b >= 0.0 {
        return f64::INFINITY;
    }
    if gamma == -1.0 {
        // interval on one side of 0
        return (b.abs().ln() - a.abs().ln()).abs();
    }
    if a >= 0.0 || b <= 0.0 {
        // one-sided: a^{g+1} expm1((g+1) ln(1 + (b-a)/a)) / (g+1) avoids cancellation
        let (lo, hi) = if a >= 0.0 { (a, b) } else { (-b, -a) };
        if lo > 0.0 {
            let g1 = gamma + 1.0;
            return lo.powf(g1) * (g1 * ((hi - lo) / lo).ln_1p()).exp_m1() / g1;
        }
    }
    let prim = |x: f64| x.signum() * x.abs().powf(gamma + 1.0) / (gamma + 1.0);
    prim(b) - prim(a)
}

/// Family of intervals scanned by [`ap_constant`].
#[derive(Clone, Debug, PartialEq)]
pub struct ApScan {
    pub half_range: f64,
    pub center_step: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub essinf_samples: usize,
}

impl Default for ApScan {
    fn default() -> Self {
        ApScan {
            half_range: 32.0,
            center_step: 0.25,
            j_min: -20,
            j_max: 6,
            essinf_samples: 4097,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApMethod {
    ClosedForm,
    Scan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApEstimate {
    pub p: f64,
    /// `[ϱ]_p`; `+∞` flags a weight outside A_p.
    pub constant: f64,
    /// `(center, half_length)` of the maximizing interval.
    pub attaining_interval: (f64, f64),
    pub method: ApMethod,
    /// Closed form over origin-anchored intervals (power weights only).
    pub closed_form: Option<f64>,
    /// Largest scanned value over origin-anchored intervals.
    pub origin_anchored: f64,
    /// Largest scanned value over all intervals.
    pub scanned: f64,
}

impl ApEstimate {
    pub fn in_ap(&self) -> bool {
        self.constant.is_finite()
    }
}

fn ap_value(w: &Weight, p: f64, a: f64, b: f64, samples: usize) -> Result<f64> {
    let len = b - a;
    let m1 = w.integral_pow(1.0, a, b)?;
    if !m1.is_finite() {
        return Ok(f64::INFINITY);
    }
    if p > 1.0 {
        let m2 = w.integral_pow(1.0 / (1.0 - p), a, b)?;
        if !m2.is_finite() {
            return Ok(f64::INFINITY);
        }
        Ok(len.powf(-p) * m1 * m2.powf(p - 1.0))
    } else {
        let sing = w.singular_points();
        let mut inf = f64::INFINITY;
        for i in 0..samples {
            let x = a + len * i as f64 / (samples - 1) as f64;
            if sing.contains(&x) {
                continue;
            }
            inf = inf.min(w.eval(x));
        }
        if inf <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(m1 / len / inf)
    }
}

/// Estimates `[ϱ]_p` over the interval family `scan`.
pub fn ap_constant(w: &Weight, p: f64, scan: &ApScan) -> Result<ApEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p must lie in [1, ∞), got {p}")));
    }
    let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
    let mut origin = f64::NEG_INFINITY;
    let mut consider = |v: f64, c: f64, h: f64, anchored: bool| -> Result<()> {
        if v < 1.0 - 1e-9 {
            return Err(Error::Invariant(format!("A_p average below 1 ({v}) on interval centered {c} half-length {h}")));
        }
        if v > best.0 {
            best = (v, (c, h));
        }
        if anchored {
            origin = origin.max(v);
        }
        Ok(())
    };
    let n = (scan.half_range / scan.center_step).round() as i64;
    for j in scan.j_min..=scan.j_max {
        let h = 2f64.powi(j);
        for i in -n..=n {
            let c = i as f64 * scan.center_step;
            let v = ap_value(w, p, c - h, c + h, scan.essinf_samples)?;
            consider(v, c, h, false)?;
        }
        let l = 2.0 * h;
        consider(ap_value(w, p, 0.0, l, scan.essinf_samples)?, h, h, true)?;
        consider(ap_value(w, p, -l, 0.0, scan.essinf_samples)?, -h, h, true)?;
    }
    let closed_form = match w.kind {
        WeightKind::Power(alpha) => Some(power_closed_form(alpha, p)),
        _ => None,
    };
    let scanned = best.0;
    let (constant, method) = match closed_form {
        Some(cf) if cf >= scanned => (cf, ApMethod::ClosedForm),
        _ => (scanned, ApMethod::Scan),
    };
    Ok(ApEstimate {
        p,
        constant,
        attaining_interval: best.1,
        method,
        closed_form,
        origin_anchored: origin,
        scanned,
    })
}

/// `[|x|^alpha]_p` restricted to intervals with an endpoint at 0.
pub fn power_closed_form(alpha: f64, p: f64) -> f64 {
    if alpha <= -1.0 {
        return f64::INFINITY;
    }
    if p == 1.0 {
        return if alpha <= 0.0 { 1.0 / (alpha + 1.0) } else { f64::INFINITY };
    }
    if alpha >= p - 1.0 {
        return f64::INFINITY;
    }
    1.0 / ((alpha + 1.0) * (1.0 - alpha / (p - 1.0)).powf(p - 1.0))
}

/// The space `L^p(ϱ dx)`. The A_p estimate is computed once on first use.
#[derive(Clone, Debug)]
pub struct WeightedSpaceParams {
    pub p: f64,
    pub weight: Weight,
    ap: Arc<OnceLock<std::result::Result<ApEstimate, Error>>>,
}

impl PartialEq for WeightedSpaceParams {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.weight == o.weight
    }
}

impl WeightedSpaceParams {
    pub fn new(p: f64, weight: Weight) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponent p must lie in [1, ∞), got {p}")));
        }
        Ok(WeightedSpaceParams {
            p,
            weight,
            ap: Arc::new(OnceLock::new()),
        })
    }

    pub fn unweighted(p: f64) -> Result<Self> {
        Self::new(p, Weight::constant(1.0)?)
    }

    /// `p'` with `1/p + 1/p' = 1`; infinite at `p = 1`.
    pub fn conjugate(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn label(&self) -> String {
        format!("p={};{}", self.p, self.weight.label())
    }

    pub fn ap_estimate(&self) -> Result<ApEstimate> {
        self.ap
            .get_or_init(|| ap_constant(&self.weight, self.p, &ApScan::default()))
            .clone()
    }

    /// `[ϱ]_p`, or `NotInAp`.
    pub fn ap(&self) -> Result<f64> {
        let e = self.ap_estimate()?;
        if e.in_ap() {
            Ok(e.constant)
        } else {
            Err(Error::NotInAp { p: self.p })
        }
    }

    /// `C₁ = 6 · 3^{2/p} [ϱ]_p^{1/p}`.
    pub fn c1(&self) -> Result<f64> {
        Ok(6.0 * 3f64.powf(2.0 / self.p) * self.ap()?.powf(1.0 / self.p))
    }
}

#[inline]
fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v.abs()
    } else if p == 2.0 {
        v * v
    } else if p == 3.0 {
        (v * v * v).abs()
    } else {
        v.abs().powf(p)
    }
}

fn merged_points(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).chain(c).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `∫ |f|^p ϱ` with its error estimate.
pub fn weighted_power_integral(f: &RealFunction, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<Integral> {
    let p = sp.p;
    let w = sp.weight.clone();
    let env = w.weigh(&f.envelope().pow(p));
    let pts = merged_points(f.breakpoints(), &w.singular_points(), &cfg.singular_points);
    let cfg = cfg.with_singular_points(&pts);
    integrate_line(|x| Ok(pow_abs(f.eval(x)?, p) * w.eval(x)), &env, &cfg)
}

/// `‖f‖_{p,ϱ}`.
pub fn weighted_norm(f: &RealFunction, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(weighted_power_integral(f, sp, cfg)?.value.max(0.0).powf(1.0 / sp.p))
}

/// Upper estimate of `‖f‖_{p,ϱ}`: the truncated integral plus its error estimate.
pub fn weighted_norm_upper(f: &RealFunction, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<f64> {
    let i = weighted_power_integral(f, sp, cfg)?;
    Ok((i.value.max(0.0) + i.err_estimate).powf(1.0 / sp.p))
}

/// `∫ |f g| ϱ`.
pub fn pairing(f: &RealFunction, g: &RealFunction, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<f64> {
    let w = sp.weight.clone();
    let env = w.weigh(&f.envelope().product(g.envelope()));
    let pts = merged_points(f.breakpoints(), g.breakpoints(), &w.singular_points());
    let pts = merged_points(&pts, &cfg.singular_points, &[]);
    let cfg = cfg.with_singular_points(&pts);
    Ok(integrate_line(|x| Ok((f.eval(x)? * g.eval(x)?).abs() * w.eval(x)), &env, &cfg)?.value)
}

/// Plain essential supremum of `|g|` by dense sampling of `[-R, R]`.
pub fn sup_norm(g: &RealFunction, cfg: &QuadratureConfig) -> Result<f64> {
    let r = cfg.truncation_radius.max(match g.envelope() {
        Envelope::Compact { lo, hi } => lo.abs().max(hi.abs()),
        e => e.valid_from().min(cfg.max_radius),
    });
    let n = 20001;
    let mut s: f64 = 0.0;
    for i in 0..n {
        let x = -r + 2.0 * r * i as f64 / (n - 1) as f64;
        if g.breakpoints().contains(&x) {
            continue;
        }
        s = s.max(g.eval(x)?.abs());
    }
    Ok(s)
}

/// A function `G` in the unit ball of `L^{p'}(ϱ dx)`.
#[derive(Clone, Debug)]
pub struct DualWitness {
    pub g: RealFunction,
    pub norm_pprime: f64,
    pub space: WeightedSpaceParams,
}

fn dual_norm(g: &RealFunction, space: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<f64> {
    if space.p == 1.0 {
        sup_norm(g, cfg)
    } else {
        let dual = WeightedSpaceParams::new(space.conjugate(), space.weight.clone())?;
        weighted_norm(g, &dual, cfg)
    }
}

impl DualWitness {
    /// Checks `‖G‖_{p',ϱ} <= 1 + 1e-9`.
    pub fn new(g: RealFunction, space: WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<Self> {
        let n = dual_norm(&g, &space, cfg)?;
        if n > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument(format!("dual witness has norm {n} > 1")));
        }
        Ok(DualWitness { g, norm_pprime: n, space })
    }

    /// Same as [`DualWitness::new`] without the unit-ball check.
    pub fn unnormalized(g: RealFunction, space: WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<Self> {
        let n = dual_norm(&g, &space, cfg)?;
        Ok(DualWitness { g, norm_pprime: n, space })
    }
}

/// The norming function of `f`: `(|f|/‖f‖)^{p-1}`, or `1` when `p = 1`.
pub fn extremal_dual(f: &RealFunction, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<DualWitness> {
    let n = weighted_norm(f, sp, cfg)?;
    if n == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let g = if sp.p == 1.0 {
        RealFunction::new("1", Envelope::bounded(1.0), |_| 1.0)
    } else {
        let e = f.evaluator();
        let q = sp.p - 1.0;
        RealFunction::fallible(format!("dual({})", f.label()), f.envelope().scaled(1.0 / n).pow(q), move |x| {
            Ok((e(x)?.abs() / n).powf(q))
        })
        .with_breakpoints(f.breakpoints().to_vec())
    };
    DualWitness::new(g, sp.clone(), cfg)
}

/// Compact-set embedding into `L¹`: `‖fχ_A‖₁ <= [ϱ]_p^{1/p} ϱ(A)^{-1/p} ‖fχ_A‖_{p,ϱ}`.
pub fn embed_l1(f: &RealFunction, sp: &WeightedSpaceParams, a: (f64, f64), cfg: &QuadratureConfig) -> Result<InequalityReport> {
    let (lo, hi) = a;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    let ap = sp.ap()?;
    let w = sp.weight.clone();
    let pts = merged_points(f.breakpoints(), &w.singular_points(), &cfg.singular_points);
    let icfg = cfg.with_singular_points(&pts);
    let lhs = integrate_interval(|x| Ok(f.eval(x)?.abs()), lo, hi, &icfg)?.value;
    let p = sp.p;
    let local = integrate_interval(|x| Ok(pow_abs(f.eval(x)?, p) * w.eval(x)), lo, hi, &icfg)?
        .value
        .powf(1.0 / p);
    let mass = w.integral_pow(1.0, lo, hi)?;
    let k = ap.powf(1.0 / p) * mass.powf(-1.0 / p);
    let rhs = if local == 0.0 { 0.0 } else { k * local };
    let params = ReportParams::new(p, w.label()).with("f", f.label()).with("A", format!("[{lo},{hi}]"));
    Ok(
        InequalityReport::new("embed_l1", params, lhs, rhs, k, "[w]_p^(1/p) w(A)^(-1/p)", cfg.rel_tol).with_note(format!(
            "with the factor |A| the right side is {}",
            crate::report::fmt_g12(rhs * (hi - lo))
        )),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integral_closed_forms() {
        assert!((power_integral(0.5, -1.0, 1.0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((power_integral(-0.5, 0.0, 4.0) - 4.0).abs() < 1e-15);
        assert!(power_integral(-2.0, -1.0, 1.0).is_infinite());
        assert!((power_integral(-1.0, 1.0, std::f64::consts::E) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_values() {
        assert!((power_closed_form(0.5, 2.0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((power_closed_form(1.0, 3.0) - 2.0).abs() < 1e-15);
        assert!(power_closed_form(-2.0, 2.0).is_infinite());
        assert!(power_closed_form(1.0, 2.0).is_infinite());
        assert!((power_closed_form(-0.5, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tabulated_weight_interpolates() {
        let w = Weight::tabulated(vec![0.0, 1.0, 3.0], vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(w.eval(-5.0), 1.0);
        assert_eq!(w.eval(0.5), 1.5);
        assert_eq!(w.eval(2.0), 3.0);
        assert_eq!(w.eval(9.0), 4.0);
        assert!(Weight::tabulated(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn parse_weight_specs() {
        assert_eq!(Weight::parse("const:1").unwrap(), Weight::constant(1.0).unwrap());
        assert_eq!(Weight::parse("power:0.5").unwrap(), Weight::power(0.5));
        assert!(Weight::parse("power").is_err());
        assert!(Weight::parse("const:-1").is_err());
        assert!(Weight::parse("tab:0/1,1/2").is_ok());
    }
}
