use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sinc::SincExpansion;
use super::vp::vp_approx;
use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, Envelope, QuadratureConfig, RealFunction};
use crate::weights::{weighted_norm, WeightKind, WeightedSpaceParams};

#[derive(Clone, Debug, PartialEq)]
pub enum DeviationMethod {
    /// `‖f − J(f, σ/2)‖`
    Vp,
    /// Searched sinc expansion with `2N+1` coefficients.
    Oracle(usize),
    /// `f` is itself of type at most `σ`.
    Exact,
    /// `A₀ = ‖f‖`, the zero candidate.
    Zero,
}

/// An upper bound for the best approximation `A_σ(f)` by functions of type `σ`.
#[derive(Clone, Debug)]
pub struct DeviationEstimate {
    pub sigma: f64,
    pub upper: f64,
    pub method: DeviationMethod,
    pub label: String,
    /// The approximant found by the oracle.
    pub approximant: Option<SincExpansion>,
}

pub fn deviation_upper(f: &RealFunction, sigma: f64, sp: &WeightedSpaceParams, cfg: &QuadratureConfig) -> Result<DeviationEstimate> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("type must be positive, got {sigma}")));
    }
    let j = vp_approx(f, sigma / 2.0, cfg)?;
    let upper = weighted_norm(&f.sub(&j), sp, cfg)?;
    Ok(DeviationEstimate {
        sigma,
        upper,
        method: DeviationMethod::Vp,
        label: f.label().to_string(),
        approximant: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    /// Coefficients `c_{-N..N}`.
    pub n: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_passes: usize,
    /// Relative objective decrease per pass below which a run counts as converged.
    pub tol: f64,
    /// Radius of the adaptive quadrature used for the final value.
    pub final_radius: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n: 12,
            restarts: 3,
            seed: 0x5eed,
            max_passes: 60,
            tol: 1e-9,
            final_radius: 1024.0,
        }
    }
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (mut q0, mut q1) = (1.0, x);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * x * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                xs[i] = x;
                ws[i] = 2.0 / ((1.0 - x * x) * dq * dq);
                break;
            }
        }
    }
    (xs, ws)
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

/// `(c, α)` with `ϱ(x) <= c |x|^α` far out.
fn weight_tail(sp: &WeightedSpaceParams, r: f64) -> (f64, f64) {
    match sp.weight.kind() {
        WeightKind::Constant(c) => (*c, 0.0),
        WeightKind::Power(a) => (1.0, *a),
        WeightKind::Tabulated { .. } => (sp.weight.eval(r).max(sp.weight.eval(-r)), 0.0),
    }
}

struct Problem {
    p: f64,
    /// quadrature weights times `ϱ`
    w: Vec<f64>,
    fv: Vec<f64>,
    basis: Vec<Vec<f64>>,
    /// penalty `κ|Σ(−1)^n c_n|^p` for the truncated tail
    kappa: f64,
    constrained: bool,
    n: usize,
}

impl Problem {
    fn objective(&self, r: &[f64], m0: f64) -> f64 {
        let mut s = 0.0;
        for (ri, wi) in r.iter().zip(&self.w) {
            s += wi * pow_abs(*ri, self.p);
        }
        s + self.kappa * pow_abs(m0, self.p)
    }

    fn sign(i: usize, n: usize) -> f64 {
        // index i ↦ n_i = i − N
        if (i as i64 - n as i64).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Coefficient changes per unit step in coordinate `j`.
    fn direction(&self, j: usize) -> Vec<(usize, f64)> {
        if !self.constrained {
            return vec![(j, 1.0)];
        }
        let n = self.n;
        let nf = n as f64;
        let sj = Self::sign(j, n);
        let idx = j as f64 - nf;
        let sn = Self::sign(2 * n, n);
        vec![(j, 1.0), (2 * n, sn * sj * (-1.0 - idx / nf) / 2.0), (0, sn * sj * (-1.0 + idx / nf) / 2.0)]
    }

    fn enforce(&self, c: &mut [f64]) {
        if !self.constrained {
            return;
        }
        let n = self.n;
        let nf = n as f64;
        let (mut s0, mut s1) = (0.0, 0.0);
        for i in 1..2 * n {
            let d = Self::sign(i, n) * c[i];
            s0 += d;
            s1 += (i as f64 - nf) * d;
        }
        let dn = (-s0 - s1 / nf) / 2.0;
        let dm = (-s0 + s1 / nf) / 2.0;
        let sn = Self::sign(2 * n, n);
        c[2 * n] = sn * dn;
        c[0] = sn * dm;
    }

    fn residual(&self, c: &[f64]) -> Vec<f64> {
        let mut r = self.fv.clone();
        for (ci, b) in c.iter().zip(&self.basis) {
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= ci * bi;
            }
        }
        r
    }

    fn m0(&self, c: &[f64]) -> f64 {
        c.iter().enumerate().map(|(i, ci)| Self::sign(i, self.n) * ci).sum()
    }

    /// Minimizes along `v` (grid values of the direction), returns the step.
    fn line_search(&self, r: &[f64], v: &[f64], m0: f64, dm0: f64, scale: f64) -> f64 {
        if self.p == 2.0 {
            let (mut num, mut den) = (0.0, 0.0);
            for ((ri, vi), wi) in r.iter().zip(v).zip(&self.w) {
                num += wi * ri * vi;
                den += wi * vi * vi;
            }
            num -= self.kappa * dm0 * m0;
            den += self.kappa * dm0 * dm0;
            return if den > 0.0 { num / den } else { 0.0 };
        }
        let phi = |t: f64| {
            let mut s = 0.0;
            for ((ri, vi), wi) in r.iter().zip(v).zip(&self.w) {
                s += wi * pow_abs(ri - t * vi, self.p);
            }
            s + self.kappa * pow_abs(m0 + t * dm0, self.p)
        };
        let f0 = phi(0.0);
        let mut h = scale.max(1e-8);
        let (fp, fm) = (phi(h), phi(-h));
        if fp >= f0 && fm >= f0 {
            // minimum inside [-h, h]
            return golden(&phi, -h, h);
        }
        let dir = if fp < fm { 1.0 } else { -1.0 };
        let mut prev = f0;
        let mut lo = 0.0;
        let mut cur = dir * h;
        let mut fc = if dir > 0.0 { fp } else { fm };
        for _ in 0..60 {
            if fc >= prev {
                break;
            }
            prev = fc;
            lo = cur - dir * h;
            h *= 2.0;
            cur += dir * h;
            fc = phi(cur);
        }
        let (a, b) = if dir > 0.0 { (lo, cur) } else { (cur, lo) };
        golden(&phi, a, b)
    }
}

fn golden(phi: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        }
    }
    if f1 < f2 {
        x1
    } else {
        x2
    }
}

fn build_problem(f: &RealFunction, sigma: f64, sp: &WeightedSpaceParams, oc: &OracleConfig, cfg: &QuadratureConfig) -> Result<Problem> {
    let n = oc.n;
    let p = sp.p;
    let xmax = n as f64 * PI / sigma;
    let r = cfg.truncation_radius.max(2.0 * xmax + 8.0);
    let width = 0.25f64.min(PI / (2.0 * sigma));
    let mut edges: Vec<f64> = (0..=((2.0 * r / width).ceil() as usize)).map(|i| -r + i as f64 * width).collect();
    edges.extend(f.breakpoints().iter().chain(sp.weight.singular_points().iter()).filter(|b| b.abs() < r));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let (gx, gw) = gauss_legendre(8);
    let mut xs = Vec::new();
    let mut w = Vec::new();
    for e in edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
        for (t, wt) in gx.iter().zip(&gw) {
            let x = m + h * t;
            xs.push(x);
            w.push(wt * h * sp.weight.eval(x));
        }
    }
    let fv = xs.iter().map(|x| f.eval(*x)).collect::<Result<Vec<_>>>()?;
    let basis = (0..=2 * n)
        .map(|i| {
            let k = i as f64 - n as f64;
            xs.iter()
                .map(|x| {
                    let u = sigma * x - k * PI;
                    if u.abs() < 1e-12 {
                        1.0
                    } else {
                        u.sin() / u
                    }
                })
                .collect()
        })
        .collect();
    let constrained = p == 1.0;
    let kappa = if constrained {
        0.0
    } else {
        let (c, alpha) = weight_tail(sp, r);
        if p - alpha - 1.0 <= 0.0 {
            return Err(Error::TailUnbounded { power: p - alpha });
        }
        // mean of |sin|^p over a period
        let mp = integrate_interval(|t| Ok(t.sin().abs().powf(p)), 0.0, PI, &QuadratureConfig::default())?.value / PI;
        2.0 * sigma.powf(-p) * mp * c * r.powf(1.0 + alpha - p) / (p - alpha - 1.0)
    };
    Ok(Problem {
        p,
        w,
        fv,
        basis,
        kappa,
        constrained,
        n,
    })
}

fn solve_spd(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let ridge = 1e-13 * (0..n).map(|i| a[i][i]).fold(0.0, f64::max);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += ridge;
    }
    for k in 0..n {
        let piv = (k..n).max_by(|i, j| a[*i][k].abs().total_cmp(&a[*j][k].abs()))?;
        a.swap(k, piv);
        b.swap(k, piv);
        if a[k][k] == 0.0 {
            return None;
        }
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Iteratively reweighted least squares for the `p = 1` objective.
fn irls(pb: &Problem, c: &mut [f64], iters: usize) {
    let free: Vec<usize> = (1..2 * pb.n).collect();
    let cols: Vec<Vec<f64>> = free
        .iter()
        .map(|j| {
            let mut v = vec![0.0; pb.fv.len()];
            for (i, a) in pb.direction(*j) {
                for (vk, bk) in v.iter_mut().zip(&pb.basis[i]) {
                    *vk += a * bk;
                }
            }
            v
        })
        .collect();
    let mut obj = pb.objective(&pb.residual(c), 0.0);
    for _ in 0..iters {
        let r = pb.residual(c);
        let rmax = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-9 * rmax.max(1e-300);
        let u: Vec<f64> = r.iter().zip(&pb.w).map(|(ri, wi)| wi / ri.abs().max(eps)).collect();
        let m = cols.len();
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for i in 0..m {
            for j in 0..=i {
                let s: f64 = cols[i].iter().zip(&cols[j]).zip(&u).map(|((x, y), w)| x * y * w).sum();
                a[i][j] = s;
                a[j][i] = s;
            }
            b[i] = cols[i].iter().zip(&pb.fv).zip(&u).map(|((x, y), w)| x * y * w).sum();
        }
        let Some(x) = solve_spd(a, b) else { return };
        let mut trial = c.to_vec();
        for (j, xj) in free.iter().zip(&x) {
            trial[*j] = *xj;
        }
        pb.enforce(&mut trial);
        let new = pb.objective(&pb.residual(&trial), 0.0);
        if !(new < obj) {
            return;
        }
        let done = obj - new <= 1e-10 * obj;
        c.copy_from_slice(&trial);
        obj = new;
        if done {
            return;
        }
    }
}

/// Runs coordinate descent from `c`; returns the objective and whether it converged.
fn descend(pb: &Problem, c: &mut [f64], oc: &OracleConfig) -> (f64, bool) {
    pb.enforce(c);
    if pb.constrained {
        irls(pb, c, 100);
    }
    let mut r = pb.residual(c);
    let mut m0 = pb.m0(c);
    let mut obj = pb.objective(&r, m0);
    let free: Vec<usize> = if pb.constrained { (1..2 * pb.n).collect() } else { (0..=2 * pb.n).collect() };
    let dirs: Vec<Vec<(usize, f64)>> = free.iter().map(|j| pb.direction(*j)).collect();
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
    let mut v = vec![0.0; r.len()];
    for _ in 0..oc.max_passes {
        let before = obj;
        for d in &dirs {
            v.iter_mut().for_each(|x| *x = 0.0);
            let mut dm0 = 0.0;
            for (i, a) in d {
                dm0 += Problem::sign(*i, pb.n) * a;
                for (vk, bk) in v.iter_mut().zip(&pb.basis[*i]) {
                    *vk += a * bk;
                }
            }
            let t = pb.line_search(&r, &v, m0, dm0, 0.1 * scale);
            if t == 0.0 || !t.is_finite() {
                continue;
            }
            let mut trial = r.clone();
            for (tk, vk) in trial.iter_mut().zip(&v) {
                *tk -= t * vk;
            }
            let new = pb.objective(&trial, m0 + t * dm0);
            if new < obj {
                r = trial;
                m0 += t * dm0;
                obj = new;
                for (i, a) in d {
                    c[*i] += t * a;
                }
            }
        }
        // coordinate descent creeps on the nonsmooth p = 1 objective
        let tol = if pb.p == 1.0 { oc.tol.max(1e-4) } else { oc.tol };
        if before - obj <= tol * before {
            return (obj, true);
        }
    }
    (obj, false)
}

/// `‖f − g‖` over `[-R, R]` by adaptive quadrature plus explicit tail norms.
fn distance_upper(f: &RealFunction, g: &SincExpansion, sp: &WeightedSpaceParams, radius: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let p = sp.p;
    let sigma = g.sigma();
    let h = PI / sigma;
    let xmax = g.indices().map(|n| (n as f64 * h).abs()).fold(0.0, f64::max);
    let r = radius.max(2.0 * xmax).max(cfg.truncation_radius);
    let mut pts: Vec<f64> = f.breakpoints().iter().chain(sp.weight.singular_points().iter()).copied().filter(|x| x.abs() < r).collect();
    // split the range so each panel sees only a few oscillations
    let step = 8.0 * h;
    let mut x = -r + step;
    while x < r {
        pts.push(x);
        x += step;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let icfg = QuadratureConfig {
        max_subdivisions: cfg.max_subdivisions.max(200 * pts.len()),
        rel_tol: cfg.rel_tol.max(1e-6),
        abs_tol: cfg.abs_tol.max(1e-10),
        ..cfg.with_singular_points(&pts)
    };
    let w = sp.weight.clone();
    let inner = integrate_interval(|x| Ok(pow_abs(f.eval(x)? - g.eval(x), p) * w.eval(x)), -r, r, &icfg)?;
    let inner = (inner.value.max(0.0) + inner.err_estimate).powf(1.0 / p);
    let tail_norm = |env: Envelope| -> Result<f64> { Ok(w.weigh(&env.pow(p)).tail_bound(r)?.powf(1.0 / p)) };
    let f_tail = match f.envelope() {
        Envelope::Compact { lo, hi } if lo.abs().max(hi.abs()) <= r => 0.0,
        e => tail_norm(e.with_min_from(r))?,
    };
    // Σ d_n/(x − x_n) = M_k/x^{k+1} + x^{-(k+1)} Σ d_n x_n^{k+1}/(x − x_n) for |x| >= 2 max|x_n|
    let k = g.vanishing_moments() as i32;
    let d: Vec<(f64, f64)> = g
        .indices()
        .zip(g.coeffs())
        .map(|(n, c)| (n as f64 * h, if n.rem_euclid(2) == 0 { *c } else { -*c }))
        .collect();
    let mk: f64 = d.iter().map(|(x, dn)| dn * x.powi(k)).sum();
    let bk: f64 = d.iter().map(|(x, dn)| dn.abs() * x.abs().powi(k + 1)).sum();
    let g_tail = tail_norm(Envelope::polynomial(k as f64 + 1.0, mk.abs() / sigma, r))?
        + tail_norm(Envelope::polynomial(k as f64 + 2.0, 2.0 * bk / sigma, r))?;
    Ok(inner + f_tail + g_tail)
}

/// Best approximation over `SincExpansion(σ, c_{-N..N})` by coordinate descent
/// started at the samples `c_n = f(x_n)`. For `p = 1` the two leading
/// alternating moments are held at zero so the residual is integrable.
pub fn deviation_oracle(f: &RealFunction, sigma: f64, sp: &WeightedSpaceParams, oc: &OracleConfig, cfg: &QuadratureConfig) -> Result<DeviationEstimate> {
    if !(sigma > 0.0) || oc.n == 0 || oc.n > 15 {
        return Err(Error::InvalidArgument(format!("oracle needs sigma > 0 and 1 <= N <= 15, got sigma={sigma}, N={}", oc.n)));
    }
    let pb = build_problem(f, sigma, sp, oc, cfg)?;
    let n = oc.n;
    let init = (0..=2 * n)
        .map(|i| f.eval((i as f64 - n as f64) * PI / sigma))
        .collect::<Result<Vec<_>>>()?;
    let amp = init.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(oc.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged = false;
    for attempt in 0..oc.restarts.max(1) {
        let mut c = init.clone();
        if attempt > 0 {
            for ci in c.iter_mut() {
                *ci += 0.05 * amp * rng.gen_range(-1.0..1.0);
            }
        }
        let (obj, ok) = descend(&pb, &mut c, oc);
        converged |= ok;
        if best.as_ref().map_or(true, |(b, _)| obj < *b) {
            best = Some((obj, c));
        }
    }
    if !converged {
        return Err(Error::NoConvergence { restarts: oc.restarts });
    }
    let (_, c) = best.unwrap();
    let g = SincExpansion::new(sigma, -(n as i64), c)?;
    let upper = distance_upper(f, &g, sp, oc.final_radius, cfg)?;
    Ok(DeviationEstimate {
        sigma,
        upper,
        method: DeviationMethod::Oracle(n),
        label: f.label().to_string(),
        approximant: Some(g),
    })
}
