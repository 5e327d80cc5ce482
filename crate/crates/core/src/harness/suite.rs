use serde::Deserialize;

use super::fixtures::Fixture;
use super::registry::{CheckParams, MollifierKind, Verifier, CHECK_IDS, VP_CONVERGENCE_SIGMA};
use crate::error::{Error, Result};
use crate::numerics::QuadratureConfig;
use crate::report::InequalityReport;
use crate::weights::{Weight, WeightKind, WeightedSpaceParams};

/// A space `(p, weight)` in config form; the weight uses the `kind:param` grammar.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub p: f64,
    pub weight: String,
}

impl SpaceSpec {
    pub fn resolve(&self) -> Result<WeightedSpaceParams> {
        WeightedSpaceParams::new(self.p, Weight::parse(&self.weight)?)
    }
}

pub fn default_spaces() -> Vec<SpaceSpec> {
    [(1.0, "const:1"), (2.0, "const:1"), (2.0, "power:0.5"), (3.0, "power:1")]
        .iter()
        .map(|(p, w)| SpaceSpec { p: *p, weight: w.to_string() })
        .collect()
}

/// Parameter grids of a suite run.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteRanges {
    pub r: Vec<usize>,
    pub k: Vec<usize>,
    pub delta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub tau: Vec<f64>,
    pub lambda: Vec<f64>,
    pub offsets: Vec<f64>,
    pub mollifier_scales: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
    /// Final `j` of the convergence sequences.
    pub convergence_depth: u32,
    /// `L` of the shift grid `[-2L, 2L]` in the transference sandwich.
    pub transfer_radius: f64,
    /// Restricts the run to these check ids; empty means all.
    pub checks: Vec<String>,
}

impl Default for SuiteRanges {
    fn default() -> Self {
        SuiteRanges {
            r: vec![1, 2],
            k: vec![1],
            delta: (0..=6).map(|j| 2f64.powi(-j)).collect(),
            sigma: vec![1.0, 2.0, 4.0, 8.0],
            tau: vec![-5.0, -1.0, 0.0, 0.3, 2.0, 10.0],
            lambda: vec![0.25, 1.0, 8.0],
            offsets: vec![0.0, 0.5],
            mollifier_scales: vec![1.0, 0.25],
            intervals: vec![(0.0, 1.0), (-1.0, 1.0)],
            convergence_depth: 12,
            transfer_radius: 4.0,
            checks: Vec::new(),
        }
    }
}

impl SuiteRanges {
    /// A small grid for smoke runs.
    pub fn quick() -> Self {
        SuiteRanges {
            r: vec![1],
            delta: vec![1.0, 0.5, 0.25],
            sigma: vec![1.0, 2.0],
            tau: vec![-1.0, 0.3],
            lambda: vec![1.0],
            offsets: vec![0.0],
            mollifier_scales: vec![0.25],
            intervals: vec![(0.0, 1.0)],
            convergence_depth: 12,
            ..SuiteRanges::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.checks {
            if !CHECK_IDS.contains(&c.as_str()) {
                return Err(Error::UnknownCheck(c.clone()));
            }
        }
        let positive = self.sigma.iter().chain(&self.delta).chain(&self.lambda).chain(&self.mollifier_scales).all(|v| *v > 0.0 && v.is_finite());
        if !positive || !(self.transfer_radius > 0.0) || self.r.contains(&0) || self.k.contains(&0) {
            return Err(Error::InvalidArgument("suite grids need positive delta, sigma, lambda, scales, radius, r and k".into()));
        }
        if self.intervals.iter().any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidArgument("suite intervals must be nonempty".into()));
        }
        Ok(())
    }

    fn wants(&self, id: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == id)
    }

}

fn base(r: Option<usize>, k: Option<usize>) -> CheckParams {
    CheckParams { r, k, ..CheckParams::default() }
}

fn part(mut p: CheckParams, name: &str) -> CheckParams {
    p.part = Some(name.to_string());
    p
}

/// Every `(check id, params)` point for one fixture in one space.
/// Space-independent properties are only listed when `first_space` holds.
pub fn suite_points(fx: &Fixture, sp: &WeightedSpaceParams, ranges: &SuiteRanges, first_space: bool) -> Vec<(&'static str, CheckParams)> {
    let mut pts: Vec<(&'static str, CheckParams)> = Vec::new();
    let f = &fx.f;
    let deltas = &ranges.delta;
    let depth = ranges.convergence_depth;
    let dorder = f.derivative_order();

    pts.push(("duality", base(None, None)));
    for &tau in &ranges.tau {
        pts.push(("steklov_bound", CheckParams { tau: Some(tau), ..base(None, None) }));
        for &lambda in &ranges.lambda {
            pts.push(("steklov_bound_lt", CheckParams { tau: Some(tau), lambda: Some(lambda), ..base(None, None) }));
        }
    }
    for &offset in &ranges.offsets {
        pts.push(("averaging_bound", CheckParams { offset: Some(offset), ..base(None, None) }));
    }
    for kind in MollifierKind::ALL {
        for &t in &ranges.mollifier_scales {
            pts.push(("mollifier_bound", CheckParams { mollifier: Some(kind), t: Some(t), ..base(None, None) }));
        }
    }
    for &a in &ranges.intervals {
        pts.push(("embed_l1", CheckParams { interval: Some(a), ..base(None, None) }));
    }
    for half in ["lower", "upper"] {
        pts.push(("transfer_sandwich", part(CheckParams { radius: Some(ranges.transfer_radius), ..base(None, None) }, half)));
    }
    for &k in ranges.k.iter().filter(|k| **k <= dorder) {
        pts.push(("transfer_derivative", CheckParams { u: Some(0.5), ..base(None, Some(k)) }));
    }
    for &h in deltas {
        for &delta in deltas {
            if h <= delta {
                pts.push(("quasi_monotone", CheckParams { h: Some(h), delta: Some(delta), ..base(None, None) }));
            }
        }
    }
    for &r in &ranges.r {
        for &delta in deltas {
            let d = CheckParams { delta: Some(delta), ..base(Some(r), None) };
            pts.push(("inverse", d.clone()));
            if r <= dorder {
                pts.push(("bernstein_step", d.clone()));
            }
            if fx.smooth {
                pts.push(("k_equiv_upper", d.clone()));
            }
            if delta < 0.5 {
                for &k in &ranges.k {
                    pts.push(("marchaud", CheckParams { t: Some(delta), delta: None, ..base(Some(r), Some(k)) }));
                }
            }
        }
        for &sigma in &ranges.sigma {
            pts.push(("jackson", CheckParams { sigma: Some(sigma), ..base(Some(r), None) }));
            if fx.exp_type.is_some() {
                for &k in ranges.k.iter().filter(|k| **k <= dorder) {
                    pts.push(("derivative_inverse", CheckParams { sigma: Some(sigma), ..base(Some(r), Some(k)) }));
                }
            }
        }
        let quarter = CheckParams { delta: Some(0.25), ..base(Some(r), None) };
        pts.push(("modulus_props", part(quarter, "subadditive")));
        pts.push(("modulus_props", part(CheckParams { depth: Some(depth), ..base(Some(r), None) }, "monotone")));
        if fx.smooth {
            let conv = CheckParams { depth: Some(depth), ..base(Some(r), None) };
            pts.push(("modulus_props", part(conv.clone(), "zero_limit")));
            pts.push(("k_converge", conv));
        }
    }
    if fx.smooth {
        pts.push(("mollifier_converge", CheckParams { depth: Some(depth), ..base(None, None) }));
        pts.push(("vp_properties", part(CheckParams { sigma: Some(VP_CONVERGENCE_SIGMA), ..base(None, None) }, "convergence")));
    }
    let gaussian_or_bump = matches!(fx.name, "gaussian" | "bump");
    if gaussian_or_bump {
        pts.push(("vp_properties", part(base(None, None), "decreasing")));
    }
    if matches!(sp.weight.kind(), WeightKind::Constant(_)) {
        for sigma in [1.0, 4.0] {
            pts.push(("vp_properties", part(CheckParams { sigma: Some(sigma), ..base(None, None) }, "norm")));
        }
    }
    if first_space {
        if gaussian_or_bump {
            for sigma in [1.0, 2.0, 4.0] {
                pts.push(("vp_properties", part(CheckParams { sigma: Some(sigma), ..base(None, None) }, "type")));
            }
        }
        if let Some(ty) = fx.exp_type {
            pts.push(("vp_properties", part(CheckParams { sigma: Some(ty), ..base(None, None) }, "reproduction")));
        }
        if dorder >= 1 {
            for sigma in [1.0, 4.0] {
                pts.push(("vp_properties", part(CheckParams { sigma: Some(sigma), ..base(None, None) }, "commutation")));
            }
        }
    }
    pts.retain(|(id, _)| ranges.wants(id));
    pts
}

/// Sorts by check id, then `p`, weight, `r`, `k` and the parameter string.
pub fn sort_reports(reports: &mut [InequalityReport]) {
    reports.sort_by(|a, b| {
        a.check_id
            .cmp(&b.check_id)
            .then(a.params.p.total_cmp(&b.params.p))
            .then(a.params.weight.cmp(&b.params.weight))
            .then(a.params.r.cmp(&b.params.r))
            .then(a.params.k.cmp(&b.params.k))
            .then(a.params.param.cmp(&b.params.param))
    });
}

/// Runs every applicable registry check over `corpus × spaces`.
/// Errors become failed reports; the result is sorted.
pub fn run_suite(corpus: &[Fixture], spaces: &[WeightedSpaceParams], ranges: &SuiteRanges, cfg: &QuadratureConfig) -> Vec<InequalityReport> {
    run_suite_with(corpus, spaces, ranges, cfg, |_| {})
}

/// [`run_suite`] with a callback after each finished report.
pub fn run_suite_with(
    corpus: &[Fixture],
    spaces: &[WeightedSpaceParams],
    ranges: &SuiteRanges,
    cfg: &QuadratureConfig,
    mut progress: impl FnMut(&InequalityReport),
) -> Vec<InequalityReport> {
    let mut out = Vec::new();
    for fx in corpus {
        for (i, sp) in spaces.iter().enumerate() {
            let v = Verifier::new(fx, sp, cfg);
            for (id, params) in suite_points(fx, sp, ranges, i == 0) {
                let rep = v
                    .check(id, &params)
                    .unwrap_or_else(|e| InequalityReport::failed(id, params.report_params(fx, sp), &e));
                progress(&rep);
                out.push(rep);
            }
        }
    }
    sort_reports(&mut out);
    out
}
