//! Upper estimates of the K-functional between `L^p(ϱ dx)` and `W^r_{p,ϱ}`.

use std::fmt;

use crate::bandlimited::vp_approx;
use crate::error::{Error, Result};
use crate::numerics::{binomial, QuadratureConfig, RealFunction};
use crate::steklov::{mollify, mollify_derivative, t_iterate, Mollifier};
use crate::weights::{weighted_norm, WeightedSpaceParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Provenance {
    Zero,
    SelfFn,
    Mollified(f64),
    Vp(f64),
    SteklovCombo(f64),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Zero => write!(f, "zero"),
            Provenance::SelfFn => write!(f, "self"),
            Provenance::Mollified(t) => write!(f, "mollified({t})"),
            Provenance::Vp(s) => write!(f, "vp({s})"),
            Provenance::SteklovCombo(d) => write!(f, "steklov_combo({d})"),
        }
    }
}

/// A candidate `g` together with its exact `r`-th derivative.
#[derive(Clone, Debug)]
pub struct SobolevCandidate {
    pub g: RealFunction,
    pub derivative_r: RealFunction,
    pub r: usize,
    pub provenance: Provenance,
}

/// `g = Σ_{l=1}^r (−1)^{l−1} C(r,l) T_δ^{2rl} f`, with `g^{(r)}` from
/// `(T_δ h)' = (h(·+δ) − h)/δ`.
pub fn smooth_candidate(f: &RealFunction, delta: f64, r: usize, cfg: &QuadratureConfig) -> Result<SobolevCandidate> {
    if r == 0 || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("need r >= 1 and delta > 0, got r={r}, delta={delta}")));
    }
    let mut g_terms = Vec::new();
    let mut d_terms = Vec::new();
    let scale = delta.powi(-(r as i32));
    for l in 1..=r {
        let c = if l % 2 == 1 { 1.0 } else { -1.0 } * binomial(r, l);
        let m = 2 * r * l;
        g_terms.push((c, t_iterate(f, delta, m, cfg)?));
        let base = t_iterate(f, delta, m - r, cfg)?;
        for i in 0..=r {
            let s = if (r - i) % 2 == 0 { 1.0 } else { -1.0 };
            d_terms.push((c * scale * s * binomial(r, i), base.translated(-(i as f64) * delta)));
        }
    }
    Ok(SobolevCandidate {
        g: RealFunction::combination(&g_terms).with_label(format!("combo[{delta}]{}", f.label())),
        derivative_r: RealFunction::combination(&d_terms).with_label(format!("combo[{delta}]{}^({r})", f.label())),
        r,
        provenance: Provenance::SteklovCombo(delta),
    })
}

/// Which candidate families to try.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    Zero,
    SelfFn,
    Mollified,
    Vp,
    SteklovCombo,
}

pub const ALL_CANDIDATES: [CandidateKind; 5] = [
    CandidateKind::Zero,
    CandidateKind::SelfFn,
    CandidateKind::Mollified,
    CandidateKind::Vp,
    CandidateKind::SteklovCombo,
];

/// Largest `σ` used for band-limited candidates.
pub const VP_SIGMA_MAX: f64 = 16.0;

#[derive(Clone, Debug)]
pub struct KEstimate {
    pub value: f64,
    pub best: Provenance,
    /// `(candidate, ‖f − g‖ + δ^r ‖g^{(r)}‖)` in evaluation order.
    pub candidates: Vec<(Provenance, f64)>,
}

fn candidates(f: &RealFunction, delta: f64, r: usize, kinds: &[CandidateKind], cfg: &QuadratureConfig) -> Result<Vec<SobolevCandidate>> {
    let mut out = Vec::new();
    for kind in kinds {
        match kind {
            CandidateKind::Zero => out.push(SobolevCandidate {
                g: RealFunction::zero(),
                derivative_r: RealFunction::zero(),
                r,
                provenance: Provenance::Zero,
            }),
            CandidateKind::SelfFn => {
                if let Some(d) = f.derivative(r) {
                    out.push(SobolevCandidate {
                        g: f.clone(),
                        derivative_r: d,
                        r,
                        provenance: Provenance::SelfFn,
                    })
                }
            }
            CandidateKind::Mollified => {
                let base = Mollifier::gaussian(1.0)?;
                for t in [delta, delta / 2.0, delta / 4.0] {
                    let m = base.with_scale(t);
                    out.push(SobolevCandidate {
                        g: mollify(f, &m, cfg)?,
                        derivative_r: mollify_derivative(f, &m, r, cfg)?,
                        r,
                        provenance: Provenance::Mollified(t),
                    });
                }
            }
            CandidateKind::Vp => {
                if let Some(d) = f.derivative(r) {
                    for sigma in [1.0 / delta, 2.0 / delta] {
                        if sigma > VP_SIGMA_MAX {
                            continue;
                        }
                        out.push(SobolevCandidate {
                            g: vp_approx(f, sigma, cfg)?,
                            derivative_r: vp_approx(&d, sigma, cfg)?,
                            r,
                            provenance: Provenance::Vp(sigma),
                        });
                    }
                }
            }
            CandidateKind::SteklovCombo => out.push(smooth_candidate(f, delta, r, cfg)?),
        }
    }
    Ok(out)
}

/// `K_r(f, δ) <= min over candidates of ‖f − g‖ + δ^r ‖g^{(r)}‖`.
pub fn k_functional_with(
    f: &RealFunction,
    delta: f64,
    r: usize,
    sp: &WeightedSpaceParams,
    kinds: &[CandidateKind],
    cfg: &QuadratureConfig,
) -> Result<KEstimate> {
    if r == 0 || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("need r >= 1 and delta > 0, got r={r}, delta={delta}")));
    }
    let dr = delta.powi(r as i32);
    let mut vals = Vec::new();
    for c in candidates(f, delta, r, kinds, cfg)? {
        let v = match c.provenance {
            Provenance::Zero => weighted_norm(f, sp, cfg)?,
            Provenance::SelfFn => dr * weighted_norm(&c.derivative_r, sp, cfg)?,
            _ => weighted_norm(&f.sub(&c.g), sp, cfg)? + dr * weighted_norm(&c.derivative_r, sp, cfg)?,
        };
        vals.push((c.provenance, v));
    }
    let (best, value) = vals
        .iter()
        .fold(None::<(Provenance, f64)>, |acc, (p, v)| match acc {
            Some((_, b)) if b <= *v => acc,
            _ => Some((*p, *v)),
        })
        .ok_or_else(|| Error::InvalidArgument("empty candidate set".into()))?;
    Ok(KEstimate { value, best, candidates: vals })
}

pub fn k_functional(f: &RealFunction, delta: f64, r: usize, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<KEstimate> {
    k_functional_with(f, delta, r, sp, &ALL_CANDIDATES, cfg)
}
