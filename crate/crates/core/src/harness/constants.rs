use std::f64::consts::PI;

use crate::error::Result;
use crate::weights::WeightedSpaceParams;

/// Explicit constants of the weighted inequalities for one space.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantTable {
    pub p: f64,
    /// `[ϱ]_p`
    pub ap: f64,
    /// `6 · 3^{2/p} [ϱ]_p^{1/p}`
    pub c1: f64,
}

/// Which local definition of `C₂(1)` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum C2Variant {
    /// `C₂(1) = 1`, used by the direct estimate.
    Jackson,
    /// `C₂(1) = 36`, used by the Marchaud estimate.
    Marchaud,
}

fn pow2(e: usize) -> f64 {
    2f64.powi(e as i32)
}

impl ConstantTable {
    /// Fails with `NotInAp` when the weight is not in `A_p`.
    pub fn new(sp: &WeightedSpaceParams) -> Result<Self> {
        let ap = sp.ap()?;
        Ok(ConstantTable {
            p: sp.p,
            ap,
            c1: 6.0 * 3f64.powf(2.0 / sp.p) * ap.powf(1.0 / sp.p),
        })
    }

    /// Bound for `S_{1,τ}`: `3 · 3^{2/p} [ϱ]_p^{1/p}`.
    pub fn steklov(&self) -> f64 {
        3.0 * 3f64.powf(2.0 / self.p) * self.ap.powf(1.0 / self.p)
    }

    /// Bound for the averaging operator: `[ϱ]_p^{1/p}`.
    pub fn averaging(&self) -> f64 {
        self.ap.powf(1.0 / self.p)
    }

    pub fn c2(&self, r: usize, variant: C2Variant) -> f64 {
        match (r, variant) {
            (1, C2Variant::Jackson) => 1.0,
            (1, C2Variant::Marchaud) => 36.0,
            _ => pow2(r) * ((r as f64).powi(r as i32) + 34f64.powi(r as i32)),
        }
    }

    pub fn c3(&self, r: usize) -> f64 {
        self.c1 * (1.0 + 3.0 * self.c1) * pow2(r + 1) * (1.0 + pow2(2 * r - 1))
    }

    pub fn c4(&self, r: usize, k: usize) -> f64 {
        20.0 * PI * self.c1 * (1.0 + pow2(2 * r - 1)) * pow2(2 * r + 3 * k) * self.c2(r + k, C2Variant::Marchaud)
    }

    pub fn c5(&self, r: usize, k: usize) -> f64 {
        pow2(2 * k + r + 1) * self.c1
    }

    /// `25π 8^{r−1} C₂(r) C₁`
    pub fn jackson(&self, r: usize) -> f64 {
        25.0 * PI * 8f64.powi(r as i32 - 1) * self.c2(r, C2Variant::Jackson) * self.c1
    }

    /// `{(2r)^r + 2^r 34^r} C₁`
    pub fn k_equiv(&self, r: usize) -> f64 {
        let ri = r as i32;
        ((2.0 * r as f64).powi(ri) + pow2(r) * 34f64.powi(ri)) * self.c1
    }

    /// `72 C₁`
    pub fn quasi_monotone(&self) -> f64 {
        72.0 * self.c1
    }

    /// `2^{−r} C₁^r`, the factor multiplying `δ^r ‖f^{(r)}‖`.
    pub fn bernstein(&self, r: usize) -> f64 {
        self.c1.powi(r as i32) / pow2(r)
    }

    /// `2 ‖φ̃‖₁ C₁`
    pub fn mollifier(&self, majorant_norm: f64) -> f64 {
        2.0 * majorant_norm * self.c1
    }

    /// Every constant at `r ∈ {1,2}`, `k = 1`, with its formula.
    pub fn listing(&self) -> Vec<(String, f64)> {
        let mut v = vec![
            ("[w]_p".to_string(), self.ap),
            ("C1 = 6*3^(2/p)*[w]_p^(1/p)".to_string(), self.c1),
            ("steklov = 3*3^(2/p)*[w]_p^(1/p)".to_string(), self.steklov()),
            ("averaging = [w]_p^(1/p)".to_string(), self.averaging()),
            ("quasi_monotone = 72*C1".to_string(), self.quasi_monotone()),
        ];
        for r in 1..=2 {
            v.push((format!("C2({r}) direct"), self.c2(r, C2Variant::Jackson)));
            v.push((format!("C2({r}) marchaud"), self.c2(r, C2Variant::Marchaud)));
            v.push((format!("C3(r={r})"), self.c3(r)));
            v.push((format!("C4(r={r},k=1)"), self.c4(r, 1)));
            v.push((format!("C5(r={r},k=1)"), self.c5(r, 1)));
            v.push((format!("jackson(r={r}) = 25*pi*8^(r-1)*C2*C1"), self.jackson(r)));
            v.push((format!("k_equiv(r={r}) = ((2r)^r+2^r*34^r)*C1"), self.k_equiv(r)));
            v.push((format!("bernstein(r={r}) = 2^-r*C1^r"), self.bernstein(r)));
        }
        v
    }
}
