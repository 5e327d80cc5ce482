use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::constants::ConstantTable;
use super::fixtures::Fixture;
use crate::bandlimited::{deviation_oracle, deviation_upper, exp_type_estimate, vp_approx, vp_approx_with_derivatives, OracleConfig, SpectrumGrid};
use crate::error::{Error, Result};
use crate::numerics::{scaled_gaussian, QuadratureConfig, RealFunction};
use crate::report::{fmt_g12, InequalityReport, ReportParams};
use crate::smoothness::k_functional;
use crate::steklov::{averaging_operator, iterated_difference, mollify, steklov_mean, Mollifier, SteklovParams};
use crate::transference::{transfer_derivative_check, transfer_sup, UGrid};
use crate::weights::{embed_l1, extremal_dual, pairing, weighted_norm, WeightKind, WeightedSpaceParams};

/// Every check the registry knows, sorted.
pub const CHECK_IDS: [&str; 19] = [
    "averaging_bound",
    "bernstein_step",
    "derivative_inverse",
    "duality",
    "embed_l1",
    "inverse",
    "jackson",
    "k_converge",
    "k_equiv_upper",
    "marchaud",
    "modulus_props",
    "mollifier_bound",
    "mollifier_converge",
    "quasi_monotone",
    "steklov_bound",
    "steklov_bound_lt",
    "transfer_derivative",
    "transfer_sandwich",
    "vp_properties",
];

/// Nodes `2^i` at which deviations are estimated for the inverse-type sums.
pub const DEVIATION_NODES: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
/// Types at which the coefficient-search oracle also runs.
pub const ORACLE_SIGMAS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
/// Log-grid nodes per octave in the Marchaud integral.
pub const MARCHAUD_NODES_PER_OCTAVE: u32 = 2;
/// Relative level the convergence checks must reach.
pub const CONVERGENCE_LEVEL: f64 = 1e-3;
/// Type at which `‖f − J(f, σ/2)‖` must have reached the convergence level.
pub const VP_CONVERGENCE_SIGMA: f64 = 64.0;

const SUBSTITUTION_NOTE: &str = "A-values replaced by computable upper bounds (right side only grows)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MollifierKind {
    Gaussian,
    Triangular,
    Uniform,
}

impl MollifierKind {
    pub const ALL: [MollifierKind; 3] = [MollifierKind::Gaussian, MollifierKind::Triangular, MollifierKind::Uniform];

    pub fn build(self, t: f64) -> Result<Mollifier> {
        match self {
            MollifierKind::Gaussian => Mollifier::gaussian(t),
            MollifierKind::Triangular => Mollifier::triangular(t),
            MollifierKind::Uniform => Mollifier::uniform(t),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MollifierKind::Gaussian => "gaussian",
            MollifierKind::Triangular => "triangular",
            MollifierKind::Uniform => "uniform",
        }
    }
}

/// Parameters of one registry evaluation. Unused fields stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckParams {
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub h: Option<f64>,
    pub sigma: Option<f64>,
    pub t: Option<f64>,
    pub tau: Option<f64>,
    pub lambda: Option<f64>,
    pub offset: Option<f64>,
    pub u: Option<f64>,
    pub interval: Option<(f64, f64)>,
    pub mollifier: Option<MollifierKind>,
    pub part: Option<String>,
    /// Exponent `j` of the final step `2^{-j}` in convergence checks.
    pub depth: Option<u32>,
    /// Half-width `L` of the shift grid `[-2L, 2L]`.
    pub radius: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, name: &str, id: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("check `{id}` needs parameter `{name}`")))
}

impl CheckParams {
    pub fn report_params(&self, fx: &Fixture, sp: &WeightedSpaceParams) -> ReportParams {
        let mut rp = ReportParams::new(sp.p, sp.weight.label()).with("f", fx.name);
        rp.r = self.r;
        rp.k = self.k;
        let nums = [
            ("delta", self.delta),
            ("h", self.h),
            ("sigma", self.sigma),
            ("t", self.t),
            ("tau", self.tau),
            ("lambda", self.lambda),
            ("offset", self.offset),
            ("u", self.u),
            ("L", self.radius),
        ];
        for (k, v) in nums {
            if let Some(v) = v {
                rp = rp.with(k, fmt_g12(v));
            }
        }
        if let Some((a, b)) = self.interval {
            rp = rp.with("A", format!("[{}:{}]", fmt_g12(a), fmt_g12(b)));
        }
        if let Some(m) = self.mollifier {
            rp = rp.with("phi", m.name());
        }
        if let Some(j) = self.depth {
            rp = rp.with("j", j);
        }
        if let Some(part) = &self.part {
            rp = rp.with("part", part);
        }
        rp
    }
}

#[derive(Clone, Debug, Default)]
struct Deviation {
    vp: Option<f64>,
    oracle: Option<f64>,
    notes: Vec<String>,
}

/// Evaluates registry checks for one fixture in one space, caching moduli,
/// norms and deviations across checks.
pub struct Verifier<'a> {
    fx: &'a Fixture,
    sp: WeightedSpaceParams,
    cfg: QuadratureConfig,
    /// Tolerances for K-functional candidates and the shift sweep.
    coarse: QuadratureConfig,
    oracle: OracleConfig,
    consts: Result<ConstantTable>,
    norms: RefCell<BTreeMap<usize, f64>>,
    moduli: RefCell<BTreeMap<(usize, usize, u64), f64>>,
    devs: RefCell<BTreeMap<u64, Deviation>>,
    sups: RefCell<BTreeMap<u64, f64>>,
}

impl<'a> Verifier<'a> {
    pub fn new(fx: &'a Fixture, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Self {
        Verifier {
            fx,
            sp: sp.clone(),
            cfg: cfg.clone(),
            coarse: QuadratureConfig {
                rel_tol: cfg.rel_tol.max(1e-6),
                abs_tol: cfg.abs_tol.max(1e-10),
                ..cfg.clone()
            },
            oracle: OracleConfig::default(),
            consts: ConstantTable::new(sp),
            norms: RefCell::new(BTreeMap::new()),
            moduli: RefCell::new(BTreeMap::new()),
            devs: RefCell::new(BTreeMap::new()),
            sups: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn fixture(&self) -> &Fixture {
        self.fx
    }

    pub fn space(&self) -> &WeightedSpaceParams {
        &self.sp
    }

    fn consts(&self) -> Result<&ConstantTable> {
        self.consts.as_ref().map_err(|e| e.clone())
    }

    fn f(&self) -> &RealFunction {
        &self.fx.f
    }

    fn derivative(&self, k: usize) -> Result<RealFunction> {
        if k == 0 {
            return Ok(self.fx.f.clone());
        }
        self.fx
            .f
            .derivative(k)
            .ok_or_else(|| Error::InvalidArgument(format!("{} has no exact derivative of order {k}", self.fx.name)))
    }

    /// `‖f^{(k)}‖`
    fn norm_of(&self, k: usize) -> Result<f64> {
        if let Some(v) = self.norms.borrow().get(&k) {
            return Ok(*v);
        }
        let v = weighted_norm(&self.derivative(k)?, &self.sp, &self.cfg)?;
        self.norms.borrow_mut().insert(k, v);
        Ok(v)
    }

    pub fn norm(&self) -> Result<f64> {
        self.norm_of(0)
    }

    /// `Ω_r(f^{(k)}, δ)`
    fn modulus_of(&self, k: usize, r: usize, delta: f64) -> Result<f64> {
        let key = (k, r, delta.to_bits());
        if let Some(v) = self.moduli.borrow().get(&key) {
            return Ok(*v);
        }
        let d = iterated_difference(&self.derivative(k)?, delta, r, &self.cfg)?;
        let v = weighted_norm(&d, &self.sp, &self.cfg)?;
        self.moduli.borrow_mut().insert(key, v);
        Ok(v)
    }

    pub fn modulus(&self, r: usize, delta: f64) -> Result<f64> {
        self.modulus_of(0, r, delta)
    }

    fn transfer_sup(&self, l: f64) -> Result<f64> {
        if let Some(v) = self.sups.borrow().get(&l.to_bits()) {
            return Ok(*v);
        }
        let v = transfer_sup(self.f(), &self.sp, &UGrid::covering(l), &self.coarse)?;
        self.sups.borrow_mut().insert(l.to_bits(), v);
        Ok(v)
    }

    fn deviation(&self, sigma: f64) -> Result<Deviation> {
        if let Some(d) = self.devs.borrow().get(&sigma.to_bits()) {
            return Ok(d.clone());
        }
        let mut d = Deviation::default();
        d.vp = Some(deviation_upper(self.f(), sigma, &self.sp, &self.cfg)?.upper);
        if ORACLE_SIGMAS.contains(&sigma) {
            match deviation_oracle(self.f(), sigma, &self.sp, &self.oracle, &self.cfg) {
                Ok(e) => d.oracle = Some(e.upper),
                Err(e) => d.notes.push(format!("oracle unavailable: {e}")),
            }
        }
        self.devs.borrow_mut().insert(sigma.to_bits(), d.clone());
        Ok(d)
    }

    /// Upper bound for `A_σ(f)` and the method that produced it.
    fn deviation_bound(&self, sigma: f64) -> Result<(f64, &'static str)> {
        let norm = self.norm()?;
        if sigma <= 0.0 {
            return Ok((norm, "zero"));
        }
        if self.fx.exp_type.is_some_and(|t| t <= sigma) {
            return Ok((0.0, "exact"));
        }
        let d = self.deviation(sigma)?;
        let mut best = (norm, "zero");
        if let Some(v) = d.vp.filter(|v| *v < best.0) {
            best = (v, "vp");
        }
        if let Some(v) = d.oracle.filter(|v| *v < best.0) {
            best = (v, "oracle");
        }
        Ok(best)
    }

    /// `A_s` bounded by the deviation at the largest grid node not above `s`.
    fn deviation_step(&self, s: f64) -> Result<f64> {
        match DEVIATION_NODES.iter().rev().find(|n| **n <= s) {
            Some(n) => Ok(self.deviation_bound(*n)?.0),
            None => self.norm(),
        }
    }

    /// Runs one registry check.
    pub fn check(&self, id: &str, params: &CheckParams) -> Result<InequalityReport> {
        if !CHECK_IDS.contains(&id) {
            return Err(Error::UnknownCheck(id.to_string()));
        }
        let c = self.consts()?;
        let rp = params.report_params(self.fx, &self.sp);
        let tol = self.cfg.rel_tol;
        let rep = |lhs: f64, rhs: f64, constant: f64, formula: &str| InequalityReport::new(id, rp.clone(), lhs, rhs, constant, formula, tol);
        match id {
            "steklov_bound" => {
                let tau = need(params.tau, "tau", id)?;
                let s = steklov_mean(self.f(), SteklovParams::new(1.0, tau)?, &self.cfg)?;
                let lhs = weighted_norm(&s, &self.sp, &self.cfg)?;
                let k = c.steklov();
                Ok(rep(lhs, k * self.norm()?, k, "3*3^(2/p)*[w]_p^(1/p)"))
            }
            "steklov_bound_lt" => {
                let tau = need(params.tau, "tau", id)?;
                let lambda = need(params.lambda, "lambda", id)?;
                let s = steklov_mean(self.f(), SteklovParams::new(lambda, tau)?, &self.cfg)?;
                let lhs = weighted_norm(&s, &self.sp, &self.cfg)?;
                Ok(rep(lhs, c.c1 * self.norm()?, c.c1, "C1"))
            }
            "averaging_bound" => {
                let offset = need(params.offset, "offset", id)?;
                let t = averaging_operator(self.f(), offset, &self.cfg)?;
                let lhs = weighted_norm(&t, &self.sp, &self.cfg)?;
                let k = c.averaging();
                Ok(rep(lhs, k * self.norm()?, k, "[w]_p^(1/p)").with_note("cells of unit length meeting [-L, L]"))
            }
            "mollifier_bound" => {
                let kind = need(params.mollifier, "mollifier", id)?;
                let t = need(params.t, "t", id)?;
                let m = kind.build(t)?;
                let lhs = weighted_norm(&mollify(self.f(), &m, &self.cfg)?, &self.sp, &self.cfg)?;
                let k = c.mollifier(m.radial_majorant_norm);
                Ok(rep(lhs, k * self.norm()?, k, "2*|phi~|_1*C1").with_note(format!("|phi~|_1 = {}", fmt_g12(m.radial_majorant_norm))))
            }
            "mollifier_converge" => {
                let j = need(params.depth, "depth", id)?;
                let t = 2f64.powi(-(j as i32));
                let m = MollifierKind::Gaussian.build(t)?;
                let lhs = weighted_norm(&mollify(self.f(), &m, &self.cfg)?.sub(self.f()), &self.sp, &self.cfg)?;
                Ok(rep(lhs, CONVERGENCE_LEVEL * self.norm()?, CONVERGENCE_LEVEL, "1e-3 |f|"))
            }
            "embed_l1" => {
                let a = need(params.interval, "interval", id)?;
                let r = embed_l1(self.f(), &self.sp, a, &self.cfg)?;
                Ok(InequalityReport { params: rp, ..r })
            }
            "duality" => {
                let n = self.norm()?;
                let w = extremal_dual(self.f(), &self.sp, &self.cfg)?;
                let pr = pairing(self.f(), &w.g, &self.sp, &self.cfg)?;
                Ok(rep((pr - n).abs(), 1e-6 * n, 1e-6, "1e-6 |f|").with_note(format!("pairing {} vs norm {}", fmt_g12(pr), fmt_g12(n))))
            }
            "transfer_sandwich" => {
                let l = need(params.radius, "radius", id)?;
                let n = self.norm()?;
                let sup = self.transfer_sup(l)?;
                match params.part.as_deref() {
                    Some("lower") => Ok(rep(n, sup, 1.0, "|f| <= sup_u F")),
                    Some("upper") => {
                        let k = c.steklov();
                        Ok(rep(sup, k * n, k, "3*3^(2/p)*[w]_p^(1/p)"))
                    }
                    _ => Err(Error::InvalidArgument("transfer_sandwich needs part=lower or part=upper".into())),
                }
            }
            "transfer_derivative" => {
                let k = need(params.k, "k", id)?;
                let u = need(params.u, "u", id)?;
                let w = extremal_dual(self.f(), &self.sp, &self.cfg)?;
                let r = transfer_derivative_check(self.f(), &w, k, u, &self.cfg)?;
                Ok(InequalityReport { params: rp, ..r })
            }
            "bernstein_step" => {
                let r = need(params.r, "r", id)?;
                let delta = need(params.delta, "delta", id)?;
                let lhs = self.modulus(r, delta)?;
                let dn = delta.powi(r as i32) * self.norm_of(r)?;
                let k = c.bernstein(r);
                let stated = c.c1 * dn;
                Ok(rep(lhs, k * dn, k, "2^-r*C1^r").with_note(format!("C1*delta^r*|f^(r)| = {}", fmt_g12(stated))))
            }
            "quasi_monotone" => {
                let h = need(params.h, "h", id)?;
                let delta = need(params.delta, "delta", id)?;
                if h > delta {
                    return Err(Error::InvalidArgument(format!("quasi_monotone needs h <= delta, got h={h}, delta={delta}")));
                }
                let k = c.quasi_monotone();
                Ok(rep(self.modulus(1, h)?, k * self.modulus(1, delta)?, k, "72*C1"))
            }
            "k_equiv_upper" => {
                let r = need(params.r, "r", id)?;
                let delta = need(params.delta, "delta", id)?;
                let kest = k_functional(self.f(), delta, r, &self.sp, &self.coarse)?;
                let om = self.modulus(r, delta)?;
                let k = c.k_equiv(r);
                let ratio = if om > 0.0 { kest.value / om } else { f64::NAN };
                Ok(rep(kest.value, k * om, k, "((2r)^r+2^r*34^r)*C1")
                    .with_note(format!("K_est/Omega = {}", fmt_g12(ratio)))
                    .with_note(format!("best candidate {}", kest.best)))
            }
            "k_converge" => {
                let r = need(params.r, "r", id)?;
                let j = need(params.depth, "depth", id)?;
                let kest = k_functional(self.f(), 2f64.powi(-(j as i32)), r, &self.sp, &self.coarse)?;
                Ok(rep(kest.value, CONVERGENCE_LEVEL * self.norm()?, CONVERGENCE_LEVEL, "1e-3 |f|").with_note(format!("best candidate {}", kest.best)))
            }
            "jackson" => {
                let r = need(params.r, "r", id)?;
                let sigma = need(params.sigma, "sigma", id)?;
                let d = self.deviation(sigma)?;
                let vp = d.vp.unwrap_or(f64::INFINITY);
                let lhs = d.oracle.map_or(vp, |o| o.min(vp));
                let om = self.modulus(r, 1.0 / sigma)?;
                let k = c.jackson(r);
                let mut out = rep(lhs, k * om, k, "25*pi*8^(r-1)*C2*C1").with_note(format!(
                    "vp {}; oracle {}; lhs/Omega = {}",
                    fmt_g12(vp),
                    d.oracle.map_or("n/a".to_string(), fmt_g12),
                    fmt_g12(if om > 0.0 { lhs / om } else { f64::NAN })
                ));
                for n in d.notes {
                    out = out.with_note(n);
                }
                Ok(out)
            }
            "inverse" => {
                let r = need(params.r, "r", id)?;
                let delta = need(params.delta, "delta", id)?;
                let lhs = self.modulus(r, delta)?;
                let a0 = self.norm()?;
                let integral = self.inverse_integral(r, delta)?;
                let k = c.c3(r);
                let rhs = k * delta.powi(r as i32) * (a0 + integral);
                Ok(rep(lhs, rhs, k, "C3 = C1*(1+3*C1)*2^(r+1)*(1+2^(2r-1))")
                    .with_note(SUBSTITUTION_NOTE)
                    .with_note("A0 = |f| (zero candidate)"))
            }
            "marchaud" => {
                let r = need(params.r, "r", id)?;
                let k = need(params.k, "k", id)?;
                let t = need(params.t, "t", id)?;
                if !(t > 0.0 && t < 0.5) {
                    return Err(Error::InvalidArgument(format!("marchaud needs 0 < t < 1/2, got {t}")));
                }
                let lhs = self.modulus(r, t)?;
                let integral = self.marchaud_integral(r, k, t)?;
                let c4 = c.c4(r, k);
                Ok(rep(lhs, c4 * t.powi(r as i32) * integral, c4, "C4 = 20*pi*C1*(1+2^(2r-1))*2^(2r+3k)*C2(r+k)")
                    .with_note(format!("trapezoid in log u, {MARCHAUD_NODES_PER_OCTAVE} nodes per octave; C2(1) = 36")))
            }
            "derivative_inverse" => {
                let r = need(params.r, "r", id)?;
                let k = need(params.k, "k", id)?;
                let sigma = need(params.sigma, "sigma", id)?;
                let lhs = self.modulus_of(k, r, 1.0 / sigma)?;
                let series = self.derivative_series(r, k, sigma)?;
                let c5 = c.c5(r, k);
                Ok(rep(lhs, c5 * series, c5, "C5 = 2^(2k+r+1)*C1").with_note(SUBSTITUTION_NOTE))
            }
            "vp_properties" => self.vp_property(params, rep),
            "modulus_props" => self.modulus_property(params, rep),
            _ => Err(Error::UnknownCheck(id.to_string())),
        }
    }

    /// `∫_{1/2}^{1/δ} u^{r−1} A_{u/2} du` with `A` a step function on the node grid.
    fn inverse_integral(&self, r: usize, delta: f64) -> Result<f64> {
        let (lo, hi) = (0.5, 1.0 / delta);
        if hi <= lo {
            return Ok(0.0);
        }
        let mut cuts = vec![lo];
        cuts.extend(DEVIATION_NODES.iter().map(|n| 2.0 * n).filter(|u| *u > lo && *u < hi));
        cuts.push(hi);
        let rf = r as f64;
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let a = self.deviation_step(w[0] / 2.0)?;
            total += a * (w[1].powf(rf) - w[0].powf(rf)) / rf;
        }
        Ok(total)
    }

    /// `∫_t^1 Ω_{r+k}(f,u) u^{−r−1} du` by the trapezoid rule in `ln u`.
    fn marchaud_integral(&self, r: usize, k: usize, t: f64) -> Result<f64> {
        let octaves = -t.log2();
        let n = (octaves * MARCHAUD_NODES_PER_OCTAVE as f64).ceil().max(1.0) as usize;
        let step = octaves * std::f64::consts::LN_2 / n as f64;
        let mut total = 0.0;
        for i in 0..=n {
            let s = -(i as f64) * step;
            let u = if i == n { t } else { s.exp() };
            let g = self.modulus(r + k, u)? * u.powi(-(r as i32));
            total += if i == 0 || i == n { 0.5 * g } else { g };
        }
        Ok(total * step)
    }

    /// `σ^{−r} Σ_{ν≤⌊σ⌋} (ν+1)^{r+k−1} A_{ν/2} + Σ_{ν>⌊σ⌋} ν^{k−1} A_{ν/2}`; terms with `ν/2` at or
    /// above the type of `f` vanish.
    fn derivative_series(&self, r: usize, k: usize, sigma: f64) -> Result<f64> {
        let ty = self.fx.exp_type.ok_or_else(|| {
            Error::InvalidArgument(format!("{} is not of finite type; the deviation series does not terminate", self.fx.name))
        })?;
        let fl = sigma.floor() as usize;
        let mut head = 0.0;
        for nu in 0..=fl {
            head += ((nu + 1) as f64).powi((r + k - 1) as i32) * self.series_term(nu, ty)?;
        }
        let mut tail = 0.0;
        let mut nu = fl + 1;
        while (nu as f64) / 2.0 < ty {
            tail += (nu as f64).powi(k as i32 - 1) * self.series_term(nu, ty)?;
            nu += 1;
        }
        Ok(sigma.powi(-(r as i32)) * head + tail)
    }

    fn series_term(&self, nu: usize, ty: f64) -> Result<f64> {
        let s = nu as f64 / 2.0;
        if s >= ty {
            Ok(0.0)
        } else if nu == 0 {
            self.norm()
        } else {
            self.deviation_step(s)
        }
    }

    fn vp_property(&self, params: &CheckParams, rep: impl Fn(f64, f64, f64, &str) -> InequalityReport) -> Result<InequalityReport> {
        let id = "vp_properties";
        let part = params.part.as_deref().unwrap_or("");
        match part {
            "type" => {
                let sigma = need(params.sigma, "sigma", id)?;
                let g = vp_approx(self.f(), sigma, &self.cfg)?;
                let est = exp_type_estimate(&g, sigma, &SpectrumGrid::default())?;
                Ok(rep(est, 2.1 * sigma, 2.1, "2*sigma*1.05"))
            }
            "reproduction" => {
                let sigma = need(params.sigma, "sigma", id)?;
                let g = vp_approx(self.f(), sigma, &self.cfg)?;
                let (mut diff, mut sup) = (0.0f64, 0.0f64);
                for i in 0..=160 {
                    let x = -20.0 + 0.25 * i as f64;
                    let fx = self.f().eval(x)?;
                    diff = diff.max((g.eval(x)? - fx).abs());
                    sup = sup.max(fx.abs());
                }
                Ok(rep(diff, 1e-4 * sup, 1e-4, "1e-4 sup|f| on the grid"))
            }
            "norm" => {
                let sigma = need(params.sigma, "sigma", id)?;
                if !matches!(self.sp.weight.kind(), WeightKind::Constant(_)) {
                    return Err(Error::InvalidArgument("the norm bound is unweighted".into()));
                }
                let g = vp_approx(self.f(), sigma, &self.cfg)?;
                Ok(rep(weighted_norm(&g, &self.sp, &self.cfg)?, 1.5 * self.norm()?, 1.5, "3/2"))
            }
            "commutation" => {
                let sigma = need(params.sigma, "sigma", id)?;
                let g = vp_approx_with_derivatives(self.f(), sigma, 1, &self.cfg)?;
                let grid: Vec<f64> = (0..=16).map(|i| -4.0 + 0.5 * i as f64 + 0.1).collect();
                Ok(rep(g.derivative_discrepancy(&grid, 1e-3)?, 1e-3, 1e-3, "1e-3 relative"))
            }
            "decreasing" => {
                let mut vals = Vec::new();
                for s in [1.0, 2.0, 4.0, 8.0, 16.0] {
                    vals.push(self.deviation(s)?.vp.unwrap_or(f64::NAN));
                }
                let worst = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
                let mut seq = String::new();
                for v in &vals {
                    let _ = write!(seq, " {}", fmt_g12(*v));
                }
                Ok(rep(worst, 0.0, 0.0, "largest increase of |f - J(f,sigma/2)|").with_note(format!("sigma=1..16:{seq}")))
            }
            "convergence" => {
                let sigma = need(params.sigma, "sigma", id)?;
                let v = self.deviation(sigma)?.vp.unwrap_or(f64::NAN);
                Ok(rep(v, CONVERGENCE_LEVEL * self.norm()?, CONVERGENCE_LEVEL, "1e-3 |f|"))
            }
            other => Err(Error::InvalidArgument(format!("unknown vp_properties part `{other}`"))),
        }
    }

    fn modulus_property(&self, params: &CheckParams, rep: impl Fn(f64, f64, f64, &str) -> InequalityReport) -> Result<InequalityReport> {
        let id = "modulus_props";
        let r = need(params.r, "r", id)?;
        match params.part.as_deref().unwrap_or("") {
            "subadditive" => {
                let delta = need(params.delta, "delta", id)?;
                let partner = scaled_gaussian(1.0, "gaussian").translated(0.5);
                let sum = self.f().add(&partner);
                let lhs = weighted_norm(&iterated_difference(&sum, delta, r, &self.cfg)?, &self.sp, &self.cfg)?;
                let rhs = self.modulus(r, delta)? + weighted_norm(&iterated_difference(&partner, delta, r, &self.cfg)?, &self.sp, &self.cfg)?;
                Ok(rep(lhs, rhs, 1.0, "Omega(f) + Omega(g), g = gaussian(. - 0.5)"))
            }
            "monotone" => {
                let j = need(params.depth, "depth", id)?;
                let mut worst = f64::NEG_INFINITY;
                let mut prev = self.modulus(r, 1.0)?;
                for i in 1..=j {
                    let cur = self.modulus(r, 2f64.powi(-(i as i32)))?;
                    worst = worst.max(cur - prev);
                    prev = cur;
                }
                Ok(rep(worst, 0.0, 0.0, "largest increase along delta = 2^-j").informational())
            }
            "zero_limit" => {
                let j = need(params.depth, "depth", id)?;
                let v = self.modulus(r, 2f64.powi(-(j as i32)))?;
                Ok(rep(v, CONVERGENCE_LEVEL * self.norm()?, CONVERGENCE_LEVEL, "1e-3 |f|"))
            }
            other => Err(Error::InvalidArgument(format!("unknown modulus_props part `{other}`"))),
        }
    }
}

/// One registry evaluation for `fx` in `sp`.
pub fn verify_inequality(
    check_id: &str,
    fx: &Fixture,
    sp: &WeightedSpaceParams,
    params: &CheckParams,
    cfg: &QuadratureConfig,
) -> Result<InequalityReport> {
    Verifier::new(fx, sp, cfg).check(check_id, params)
}
