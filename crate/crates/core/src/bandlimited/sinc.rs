use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{binomial, Envelope, RealFunction};

/// `[s, s', s'', s''']` for `s(y) = sin(y)/y`.
pub fn sinc_derivatives(y: f64) -> [f64; 4] {
    if y.abs() < 1.0 {
        // power series sum_k (-1)^k y^{2k} / (2k+1)!
        let mut out = [0.0; 4];
        let mut fact = 1.0; // (2k+1)!
        for k in 0..14usize {
            if k > 0 {
                fact *= (2 * k) as f64 * (2 * k + 1) as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let e = 2 * k;
            for (m, o) in out.iter_mut().enumerate() {
                if e >= m {
                    let mut c = 1.0;
                    for t in 0..m {
                        c *= (e - t) as f64;
                    }
                    *o += sign * c * y.powi((e - m) as i32) / fact;
                }
            }
        }
        return out;
    }
    let (s, c) = y.sin_cos();
    let y2 = y * y;
    let y3 = y2 * y;
    [
        s / y,
        c / y - s / y2,
        -s / y - 2.0 * c / y2 + 2.0 * s / y3,
        -c / y + 3.0 * s / y2 + 6.0 * c / y3 - 6.0 * s / (y2 * y2),
    ]
}

/// `Σ_n c_n sinc(σx/π − n)` for `n = first, ..., first + len − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SincExpansion {
    sigma: f64,
    first: i64,
    coeffs: Vec<f64>,
}

impl SincExpansion {
    pub fn new(sigma: f64, first: i64, coeffs: Vec<f64>) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("sinc expansion needs sigma > 0 and finite coefficients".into()));
        }
        Ok(SincExpansion { sigma, first, coeffs })
    }

    /// Coefficients indexed `-N..=N`.
    pub fn symmetric(sigma: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument("symmetric expansion needs an odd number of coefficients".into()));
        }
        let n = (coeffs.len() / 2) as i64;
        Self::new(sigma, -n, coeffs)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn first_index(&self) -> i64 {
        self.first
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.coeffs.len() as i64).map(move |i| self.first + i)
    }

    pub fn node(&self, n: i64) -> f64 {
        n as f64 * PI / self.sigma
    }

    /// `k`-th derivative at `x`, `k <= 3`.
    pub fn eval_derivative(&self, k: usize, x: f64) -> f64 {
        let sx = self.sigma * x;
        let mut s = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let n = self.first + i as i64;
            s += c * sinc_derivatives(sx - n as f64 * PI)[k];
        }
        s * self.sigma.powi(k as i32)
    }

    pub fn eval(&self, x: f64) -> f64 {
        // sin(σx − nπ) = (−1)^n sin(σx), one sine for all terms away from the nodes
        let sx = self.sigma * x;
        let mut q = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = self.first + i as i64;
            let u = sx - n as f64 * PI;
            if u.abs() < 1e-3 {
                return self.eval_derivative(0, x);
            }
            q += if n.rem_euclid(2) == 0 { c / u } else { -c / u };
        }
        sx.sin() * q
    }

    /// `d_n = (−1)^n c_n`.
    fn alternating(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.indices()
            .zip(self.coeffs.iter())
            .map(|(n, c)| (n, if n.rem_euclid(2) == 0 { *c } else { -*c }))
    }

    /// `Σ_n (−1)^n c_n n^m` in index units.
    pub fn index_moment(&self, m: u32) -> f64 {
        self.alternating().map(|(n, d)| d * (n as f64).powi(m as i32)).sum()
    }

    /// Number of leading alternating moments that vanish (relative tolerance 1e-12).
    pub fn vanishing_moments(&self) -> u32 {
        for m in 0..16u32 {
            let scale: f64 = self.alternating().map(|(n, d)| d.abs() * (n as f64).abs().powi(m as i32)).sum();
            if scale == 0.0 {
                continue;
            }
            if self.index_moment(m).abs() > 1e-12 * scale {
                return m;
            }
        }
        16
    }

    /// Envelope of the `m`-th derivative. With `k` vanishing moments,
    /// `Σ d_n/(x−x_n) = Q(x)/x^k` where `Q = Σ d_n x_n^k/(x − x_n)`, giving
    /// decay `|x|^{-(k+1)}` beyond `max(2 max|x_n|, 1)`.
    pub fn derivative_envelope(&self, m: usize) -> Envelope {
        let k = self.vanishing_moments();
        let h = PI / self.sigma;
        let b: f64 = self
            .alternating()
            .map(|(n, d)| d.abs() * ((n as f64) * h).abs().powi(k as i32))
            .sum();
        let xmax = self.indices().map(|n| (n as f64 * h).abs()).fold(0.0, f64::max);
        let rising = |a: u32, l: usize| (0..l).map(|t| (a as f64) + t as f64).product::<f64>();
        let mut scale = 0.0;
        for j in 0..=m {
            let mut kj = 0.0;
            for i in 0..=j {
                let ifact: f64 = (1..=i).map(|t| t as f64).product();
                kj += binomial(j, i) * ifact * 2f64.powi(i as i32 + 1) * rising(k, j - i);
            }
            scale += binomial(m, j) * self.sigma.powi((m - j) as i32) * kj;
        }
        scale *= b / self.sigma;
        Envelope::polynomial(k as f64 + 1.0, scale, (2.0 * xmax).max(1.0))
    }

    /// As a [`RealFunction`] carrying exact derivatives up to `order <= 3`.
    pub fn to_function(&self, label: &str, order: usize) -> RealFunction {
        let order = order.min(3);
        let make = |m: usize| {
            let me = Arc::new(self.clone());
            RealFunction::new(
                if m == 0 { label.to_string() } else { format!("{label}^({m})") },
                self.derivative_envelope(m),
                move |x| if m == 0 { me.eval(x) } else { me.eval_derivative(m, x) },
            )
        };
        make(0).with_derivatives((1..=order).map(make).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_closed_forms_agree_near_switch() {
        for y in [0.999999, 1.000001, -0.9999999] {
            let a = sinc_derivatives(y);
            let (s, c) = y.sin_cos();
            let exact = [
                s / y,
                c / y - s / (y * y),
                -s / y - 2.0 * c / (y * y) + 2.0 * s / (y * y * y),
                -c / y + 3.0 * s / (y * y) + 6.0 * c / (y * y * y) - 6.0 * s / y.powi(4),
            ];
            for k in 0..4 {
                assert!((a[k] - exact[k]).abs() < 1e-9, "k={k} y={y}");
            }
        }
        assert_eq!(sinc_derivatives(0.0)[0], 1.0);
        assert!((sinc_derivatives(0.0)[2] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn interpolates_at_nodes() {
        let g = SincExpansion::new(2.0, -2, vec![0.5, -1.0, 3.0, 0.25, 2.0]).unwrap();
        for (i, n) in g.indices().enumerate() {
            assert!((g.eval(g.node(n)) - g.coeffs()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn binomial_coefficients_vanish_moments() {
        let c: Vec<f64> = (0..=6).map(|i| binomial(6, i) / 64.0).collect();
        let g = SincExpansion::new(1.0, -3, c).unwrap();
        assert_eq!(g.vanishing_moments(), 6);
        for m in 0..4 {
            let env = g.derivative_envelope(m);
            let from = env.valid_from();
            for i in 0..400 {
                let x = from + 0.37 * i as f64;
                for s in [1.0, -1.0] {
                    assert!(g.eval_derivative(m, s * x).abs() <= env.bound(x), "m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn generic_expansion_envelope_dominates() {
        let g = SincExpansion::symmetric(1.5, vec![0.3, -0.7, 1.1, 0.2, -0.4]).unwrap();
        assert_eq!(g.vanishing_moments(), 0);
        let env = g.derivative_envelope(1);
        for i in 0..400 {
            let x = env.valid_from() + 0.91 * i as f64;
            assert!(g.eval_derivative(1, x).abs() <= env.bound(x));
            assert!(g.eval_derivative(1, -x).abs() <= env.bound(x));
        }
    }
}
