//! Adaptive Gauss-Kronrod (10/21) quadrature with a global panel queue.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::envelope::Envelope;
use crate::error::{Error, Result};

/// Tolerances and limits shared by every integral in the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of panel bisections allowed per integral.
    pub max_subdivisions: usize,
    /// Initial truncation radius `L` for line integrals.
    pub truncation_radius: f64,
    /// Hard cap on the enlarged radius `L'`.
    pub max_radius: f64,
    /// Points where the integrand may be non-smooth.
    pub singular_points: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            truncation_radius: 32.0,
            max_radius: 4096.0,
            singular_points: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.truncation_radius > 0.0
            && self.max_radius >= self.truncation_radius
            && self.max_subdivisions >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid quadrature config {self:?}")))
        }
    }

    pub fn with_singular_points(&self, pts: &[f64]) -> Self {
        let mut c = self.clone();
        c.singular_points = pts.to_vec();
        c
    }
}

/// Value of an integral together with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_estimate: f64,
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525634580,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651146,
];

#[inline]
fn checked<F: Fn(f64) -> Result<f64>>(g: &F, x: f64) -> Result<f64> {
    let v = g(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x, value: v })
    }
}

/// One 21-point Kronrod panel: (value, error estimate).
fn gk21<F: Fn(f64) -> Result<f64>>(g: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = checked(g, c)?;
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = checked(g, c - dx)?;
        let f2 = checked(g, c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let habs = h.abs();
    let result = resk * h;
    let resabs = resabs * habs;
    let resasc = resasc * habs;
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, err))
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then_with(|| o.a.total_cmp(&self.a))
    }
}

/// Globally adaptive integration over consecutive panels `edges[i]..edges[i+1]`.
/// The requested tolerance is never tighter than `floor`.
fn adaptive<F: Fn(f64) -> Result<f64>>(g: &F, edges: &[f64], cfg: &QuadratureConfig, floor: f64) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk21(g, w[0], w[1])?;
            total += v;
            total_err += e;
            heap.push(Panel { a: w[0], b: w[1], value: v, err: e });
        }
    }
    let mut splits = 0usize;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs()).max(floor);
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(worst.b.abs()).max(1e-300) {
            frozen.push(worst);
            continue;
        }
        if splits >= cfg.max_subdivisions {
            heap.push(worst);
            return Err(Error::BudgetExhausted {
                a: edges[0],
                b: *edges.last().unwrap(),
                limit: cfg.max_subdivisions,
                err: total_err,
                tol,
            });
        }
        splits += 1;
        let (v1, e1) = gk21(g, worst.a, mid)?;
        let (v2, e2) = gk21(g, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        if splits % 512 == 0 {
            total = heap.iter().chain(frozen.iter()).map(|p| p.value).sum();
            total_err = heap.iter().chain(frozen.iter()).map(|p| p.err).sum();
        }
    }
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(frozen);
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = all.iter().map(|p| p.value).sum();
    let err_estimate = all.iter().map(|p| p.err).sum();
    let tol = cfg.abs_tol.max(cfg.rel_tol * f64::abs(value)).max(floor);
    if err_estimate > tol * 1.000001 {
        return Err(Error::BudgetExhausted {
            a: edges[0],
            b: *edges.last().unwrap(),
            limit: cfg.max_subdivisions,
            err: err_estimate,
            tol,
        });
    }
    Ok(Integral { value, err_estimate })
}

fn sorted_edges(a: f64, b: f64, inner: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut e: Vec<f64> = inner.into_iter().filter(|&x| x > a && x < b).collect();
    e.push(a);
    e.push(b);
    e.sort_by(f64::total_cmp);
    e.dedup();
    e
}

/// Integral of `g` over `[a, b]`, pre-split at the configured singular points.
pub fn integrate_interval<F: Fn(f64) -> Result<f64>>(g: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.validate()?;
    if !(a <= b) {
        return Err(Error::InvalidArgument(format!("integration bounds out of order: [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, err_estimate: 0.0 });
    }
    let edges = sorted_edges(a, b, cfg.singular_points.iter().copied());
    adaptive(&g, &edges, cfg, 0.0)
}

/// Integral of `g` over the line; `envelope` must dominate `|g|` outside its radius.
pub fn integrate_line<F: Fn(f64) -> Result<f64>>(g: F, envelope: &Envelope, cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.validate()?;
    let l = cfg.truncation_radius;
    let step = l / 8.0;
    match *envelope {
        Envelope::Compact { lo, hi } => {
            if hi <= lo {
                return Ok(Integral { value: 0.0, err_estimate: 0.0 });
            }
            let n = ((hi - lo) / step).ceil().max(1.0) as usize;
            let grid = (1..n).map(|i| lo + (hi - lo) * i as f64 / n as f64);
            let edges = sorted_edges(lo, hi, grid.chain(cfg.singular_points.iter().copied()));
            adaptive(&g, &edges, cfg, 0.0)
        }
        _ => {
            let mut r = l.max(envelope.valid_from());
            let mut tail = envelope.tail_bound(r)?;
            while tail > cfg.abs_tol && r < cfg.max_radius {
                r = (2.0 * r).min(cfg.max_radius).max(r);
                tail = envelope.tail_bound(r)?;
            }
            let mut inner: Vec<f64> = Vec::new();
            let m = (l / step).round() as i64;
            for i in -m..=m {
                inner.push(i as f64 * step);
            }
            let mut s = 2.0 * l;
            while s < r {
                inner.push(s);
                inner.push(-s);
                s *= 2.0;
            }
            inner.extend(cfg.singular_points.iter().copied());
            let edges = sorted_edges(-r, r, inner);
            let mut res = adaptive(&g, &edges, cfg, tail)?;
            res.err_estimate += tail;
            Ok(res)
        }
    }
}
