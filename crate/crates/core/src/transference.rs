//! The transference functional `F_{f,G}(u) = ∫ S_{1,u} f |G| ϱ`.

use crate::error::{Error, Result};
use crate::numerics::{integrate_line, QuadratureConfig, RealFunction};
use crate::report::{InequalityReport, ReportParams};
use crate::steklov::{steklov_mean, SteklovParams};
pub use crate::weights::DualWitness;
use crate::weights::{extremal_dual, WeightedSpaceParams};

pub fn transfer_functional(f: &RealFunction, w: &DualWitness, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let s = steklov_mean(f, SteklovParams::new(1.0, u)?, cfg)?;
    let g = w.g.evaluator();
    let weight = w.space.weight.clone();
    let env = weight.weigh(&s.envelope().product(w.g.envelope()));
    let mut pts: Vec<f64> = s
        .breakpoints()
        .iter()
        .chain(w.g.breakpoints())
        .copied()
        .chain(weight.singular_points())
        .chain(cfg.singular_points.iter().copied())
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let icfg = cfg.with_singular_points(&pts);
    Ok(integrate_line(|x| Ok(s.eval(x)? * g(x)?.abs() * weight.eval(x)), &env, &icfg)?.value)
}

/// Uniform grid of shifts `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct UGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl UGrid {
    /// `[-2L, 2L]` at step 0.1.
    pub fn covering(l: f64) -> Self {
        UGrid {
            lo: -2.0 * l,
            hi: 2.0 * l,
            step: 0.1,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// Supremum over the grid of `F_{|f|,G}` with `G` the extremal witness of `|f|`.
pub fn transfer_sup(f: &RealFunction, sp: &WeightedSpaceParams, grid: &UGrid, cfg: &QuadratureConfig) -> Result<f64> {
    if !(grid.step > 0.0 && grid.hi >= grid.lo) {
        return Err(Error::InvalidArgument("shift grid needs a positive step".into()));
    }
    let a = f.abs();
    let w = match extremal_dual(&a, sp, cfg) {
        Ok(w) => w,
        Err(Error::ZeroFunction) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut best: f64 = 0.0;
    for u in grid.points() {
        best = best.max(transfer_functional(&a, &w, u, cfg)?);
    }
    Ok(best)
}

/// Compares the `k`-th central difference (step 1e-3) of `u ↦ F_f(u)` with `F_{f^{(k)}}(u)`.
pub fn transfer_derivative_check(f: &RealFunction, w: &DualWitness, k: usize, u: f64, cfg: &QuadratureConfig) -> Result<InequalityReport> {
    let fk = f
        .derivative(k)
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no exact derivative of order {k}", f.label())))?;
    let h = 1e-3;
    let mut fd = 0.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let shift = (k as f64 / 2.0 - i as f64) * h;
        fd += sign * crate::numerics::binomial(k, i) * transfer_functional(f, w, u + shift, cfg)?;
    }
    fd /= h.powi(k as i32);
    let exact = transfer_functional(&fk, w, u, cfg)?;
    let diff = (fd - exact).abs();
    let allowed = 1e-4 * (1.0 + fd.abs() + exact.abs());
    let params = ReportParams::new(w.space.p, w.space.weight.label())
        .k(k)
        .with("f", f.label())
        .with("u", u);
    let mut rep = InequalityReport::new("transfer_derivative", params, diff, allowed, 1e-4, "1e-4 (1 + |lhs| + |rhs|)", 0.0);
    rep = rep.with_note(format!("finite difference {} vs exact {}", crate::report::fmt_g12(fd), crate::report::fmt_g12(exact)));
    Ok(rep)
}
