//! Decay envelopes: pointwise majorants of |g| outside a radius, with
//! closed-form two-sided tail integrals and the algebra needed to carry them
//! through sums, products, powers, shifts and weights.

use crate::error::{Error, Result};

/// Majorant of `|g(x)|` valid for `|x| >= from` (or the support, for `Compact`).
#[derive(Clone, Debug, PartialEq)]
pub enum Envelope {
    /// `g = 0` outside `[lo, hi]`.
    Compact { lo: f64, hi: f64 },
    /// `|g(x)| <= scale * exp(-rate |x|)`.
    Exponential { rate: f64, scale: f64, from: f64 },
    /// `|g(x)| <= scale * exp(-rate x^2)`.
    Gaussian { rate: f64, scale: f64, from: f64 },
    /// `|g(x)| <= scale * |x|^(-power)`. `power <= 1` is allowed but has no finite tail.
    Polynomial { power: f64, scale: f64, from: f64 },
    /// No decay information.
    Unbounded,
}

impl Envelope {
    pub fn compact(lo: f64, hi: f64) -> Self {
        Envelope::Compact { lo, hi }
    }

    pub fn exponential(rate: f64, scale: f64) -> Self {
        Envelope::Exponential { rate, scale, from: 0.0 }
    }

    pub fn gaussian(rate: f64, scale: f64) -> Self {
        Envelope::Gaussian { rate, scale, from: 0.0 }
    }

    pub fn polynomial(power: f64, scale: f64, from: f64) -> Self {
        Envelope::Polynomial { power, scale, from }
    }

    /// Bounded by a constant everywhere.
    pub fn bounded(sup: f64) -> Self {
        Envelope::Polynomial { power: 0.0, scale: sup, from: 0.0 }
    }

    /// Radius beyond which the majorant applies.
    pub fn valid_from(&self) -> f64 {
        match *self {
            Envelope::Compact { lo, hi } => lo.abs().max(hi.abs()),
            Envelope::Exponential { from, .. }
            | Envelope::Gaussian { from, .. }
            | Envelope::Polynomial { from, .. } => from,
            Envelope::Unbounded => f64::INFINITY,
        }
    }

    /// Majorant value at `x`; only meaningful for `|x| >= valid_from()`.
    pub fn bound(&self, x: f64) -> f64 {
        let ax = x.abs();
        match *self {
            Envelope::Compact { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Envelope::Exponential { rate, scale, .. } => scale * (-rate * ax).exp(),
            Envelope::Gaussian { rate, scale, .. } => scale * (-rate * ax * ax).exp(),
            Envelope::Polynomial { power, scale, .. } => scale * ax.powf(-power),
            Envelope::Unbounded => f64::INFINITY,
        }
    }

    /// Bound on `∫_{|x|>r} |g|`, both sides together. Requires `r >= valid_from()`.
    pub fn tail_bound(&self, r: f64) -> Result<f64> {
        if r < self.valid_from() {
            return Ok(f64::INFINITY);
        }
        Ok(match *self {
            Envelope::Compact { .. } => 0.0,
            Envelope::Exponential { rate, scale, .. } => 2.0 * scale * (-rate * r).exp() / rate,
            Envelope::Gaussian { rate, scale, .. } => {
                if r <= 0.0 {
                    return Ok(scale * (std::f64::consts::PI / rate).sqrt());
                }
                2.0 * scale * (-rate * r * r).exp() / (2.0 * rate * r)
            }
            Envelope::Polynomial { power, scale, .. } => {
                if power <= 1.0 {
                    if scale == 0.0 {
                        return Ok(0.0);
                    }
                    return Err(Error::TailUnbounded { power });
                }
                2.0 * scale * r.powf(1.0 - power) / (power - 1.0)
            }
            Envelope::Unbounded => return Err(Error::TailUnbounded { power: 0.0 }),
        })
    }

    /// Envelope of `c * g`.
    pub fn scaled(&self, c: f64) -> Self {
        let c = c.abs();
        if c == 0.0 {
            return Envelope::Compact { lo: 0.0, hi: 0.0 };
        }
        match self.clone() {
            Envelope::Exponential { rate, scale, from } => Envelope::Exponential { rate, scale: scale * c, from },
            Envelope::Gaussian { rate, scale, from } => Envelope::Gaussian { rate, scale: scale * c, from },
            Envelope::Polynomial { power, scale, from } => Envelope::Polynomial { power, scale: scale * c, from },
            other => other,
        }
    }

    /// Envelope of `|g|^p`.
    pub fn pow(&self, p: f64) -> Self {
        match self.clone() {
            Envelope::Exponential { rate, scale, from } => Envelope::Exponential {
                rate: rate * p,
                scale: scale.powf(p),
                from,
            },
            Envelope::Gaussian { rate, scale, from } => Envelope::Gaussian {
                rate: rate * p,
                scale: scale.powf(p),
                from,
            },
            Envelope::Polynomial { power, scale, from } => Envelope::Polynomial {
                power: power * p,
                scale: scale.powf(p),
                from,
            },
            other => other,
        }
    }

    /// Envelope of `x ↦ g(x + s)` for every `|s| <= d`.
    pub fn widen(&self, d: f64) -> Self {
        let d = d.abs();
        if d == 0.0 {
            return self.clone();
        }
        match self.clone() {
            Envelope::Compact { lo, hi } => Envelope::Compact { lo: lo - d, hi: hi + d },
            Envelope::Exponential { rate, scale, from } => Envelope::Exponential {
                rate,
                scale: scale * (rate * d).exp(),
                from: from + d,
            },
            // (|x| - d)^2 >= x^2 / 2 once |x| >= d / (1 - 1/sqrt 2)
            Envelope::Gaussian { rate, scale, from } => Envelope::Gaussian {
                rate: rate / 2.0,
                scale,
                from: (from + d).max(d / (1.0 - std::f64::consts::FRAC_1_SQRT_2)),
            },
            // |x| - d >= 3|x|/4 once |x| >= 4d
            Envelope::Polynomial { power, scale, from } => Envelope::Polynomial {
                power,
                scale: if power > 0.0 { scale * (4.0f64 / 3.0).powf(power) } else { scale },
                from: (from + d).max(4.0 * d),
            },
            Envelope::Unbounded => Envelope::Unbounded,
        }
    }

    /// Envelope of `x ↦ g(x - c)`.
    pub fn translate(&self, c: f64) -> Self {
        match *self {
            Envelope::Compact { lo, hi } => Envelope::Compact { lo: lo + c, hi: hi + c },
            _ => self.widen(c),
        }
    }

    /// Envelope of `x ↦ sup_{|y| >= |x|/2} |g(y)|`.
    pub fn dilate2(&self) -> Self {
        match self.clone() {
            Envelope::Compact { lo, hi } => {
                let r = lo.abs().max(hi.abs());
                Envelope::Compact { lo: -2.0 * r, hi: 2.0 * r }
            }
            Envelope::Exponential { rate, scale, from } => Envelope::Exponential { rate: rate / 2.0, scale, from: 2.0 * from },
            Envelope::Gaussian { rate, scale, from } => Envelope::Gaussian { rate: rate / 4.0, scale, from: 2.0 * from },
            Envelope::Polynomial { power, scale, from } => Envelope::Polynomial {
                power,
                scale: if power > 0.0 { scale * 2f64.powf(power) } else { scale },
                from: 2.0 * from,
            },
            Envelope::Unbounded => Envelope::Unbounded,
        }
    }

    /// Envelope of `g(x) * c |x|^alpha`.
    pub fn times_power(&self, alpha: f64, c: f64) -> Self {
        let base = self.scaled(c);
        if alpha == 0.0 {
            return base;
        }
        match base {
            Envelope::Exponential { rate, scale, from } => {
                if alpha > 0.0 {
                    let k = (2.0 * alpha / rate).powf(alpha) * (-alpha).exp();
                    Envelope::Exponential { rate: rate / 2.0, scale: scale * k, from }
                } else {
                    Envelope::Exponential { rate, scale, from: from.max(1.0) }
                }
            }
            Envelope::Gaussian { rate, scale, from } => {
                if alpha > 0.0 {
                    let k = (alpha / rate).powf(alpha / 2.0) * (-alpha / 2.0).exp();
                    Envelope::Gaussian { rate: rate / 2.0, scale: scale * k, from }
                } else {
                    Envelope::Gaussian { rate, scale, from: from.max(1.0) }
                }
            }
            Envelope::Polynomial { power, scale, from } => Envelope::Polynomial {
                power: power - alpha,
                scale,
                from,
            },
            other => other,
        }
    }

    /// Envelope of `g1 + g2`.
    pub fn sum(&self, other: &Envelope) -> Self {
        use Envelope::*;
        match (self, other) {
            (Unbounded, _) | (_, Unbounded) => Unbounded,
            (Compact { lo: a, hi: b }, Compact { lo: c, hi: d }) => Compact { lo: a.min(*c), hi: b.max(*d) },
            (Compact { .. }, e) | (e, Compact { .. }) => {
                let r = self.valid_from().max(other.valid_from());
                e.with_from(r)
            }
            _ => {
                let from = self.valid_from().max(other.valid_from()).max(1.0);
                let rank = |e: &Envelope| match e {
                    Gaussian { .. } => 0,
                    Exponential { .. } => 1,
                    _ => 2,
                };
                let (slow, fast) = if rank(self) >= rank(other) { (self, other) } else { (other, self) };
                let fast = fast.with_from(from).convert_like(slow);
                match (slow.with_from(from), fast) {
                    (Exponential { rate: a, scale: s, .. }, Exponential { rate: b, scale: t, .. }) => {
                        Exponential { rate: a.min(b), scale: s + t, from }
                    }
                    (Gaussian { rate: a, scale: s, .. }, Gaussian { rate: b, scale: t, .. }) => {
                        Gaussian { rate: a.min(b), scale: s + t, from }
                    }
                    (Polynomial { power: a, scale: s, .. }, Polynomial { power: b, scale: t, .. }) => {
                        Polynomial { power: a.min(b), scale: s + t, from }
                    }
                    _ => Unbounded,
                }
            }
        }
    }

    /// Envelope of `g1 * g2`.
    pub fn product(&self, other: &Envelope) -> Self {
        use Envelope::*;
        match (self, other) {
            (Compact { lo: a, hi: b }, Compact { lo: c, hi: d }) => {
                let lo = a.max(*c);
                let hi = b.min(*d);
                if lo <= hi {
                    Compact { lo, hi }
                } else {
                    Compact { lo: 0.0, hi: 0.0 }
                }
            }
            (Compact { .. }, _) => self.clone(),
            (_, Compact { .. }) => other.clone(),
            (Unbounded, _) | (_, Unbounded) => Unbounded,
            _ => {
                let from = self.valid_from().max(other.valid_from());
                match (self, other) {
                    (Polynomial { power: a, scale: s, .. }, Polynomial { power: b, scale: t, .. }) => {
                        Polynomial { power: a + b, scale: s * t, from }
                    }
                    (Polynomial { power, scale, .. }, e) | (e, Polynomial { power, scale, .. }) => {
                        e.with_from(from).times_power(-power, *scale)
                    }
                    (Exponential { rate: a, scale: s, .. }, Exponential { rate: b, scale: t, .. }) => {
                        Exponential { rate: a + b, scale: s * t, from }
                    }
                    (Gaussian { rate: a, scale: s, .. }, Gaussian { rate: b, scale: t, .. }) => {
                        Gaussian { rate: a + b, scale: s * t, from }
                    }
                    (Gaussian { rate, scale: s, .. }, Exponential { scale: t, .. })
                    | (Exponential { scale: t, .. }, Gaussian { rate, scale: s, .. }) => {
                        Gaussian { rate: *rate, scale: s * t, from }
                    }
                    _ => Unbounded,
                }
            }
        }
    }

    /// Same majorant, used only beyond `r`.
    pub fn with_min_from(&self, r: f64) -> Self {
        self.with_from(r)
    }

    fn with_from(&self, r: f64) -> Self {
        match self.clone() {
            Envelope::Exponential { rate, scale, from } => Envelope::Exponential { rate, scale, from: from.max(r) },
            Envelope::Gaussian { rate, scale, from } => Envelope::Gaussian { rate, scale, from: from.max(r) },
            Envelope::Polynomial { power, scale, from } => Envelope::Polynomial { power, scale, from: from.max(r) },
            other => other,
        }
    }

    /// Re-express a faster-decaying envelope in the family of `target`.
    fn convert_like(&self, target: &Envelope) -> Self {
        use Envelope::*;
        match (self, target) {
            (Gaussian { rate, scale, from }, Exponential { .. }) => {
                let r = from.max(1.0);
                Exponential { rate: rate * r, scale: *scale, from: r }
            }
            (Gaussian { .. }, Polynomial { .. }) => self.convert_like(&Envelope::exponential(1.0, 1.0)).convert_like(target),
            (Exponential { rate, scale, from }, Polynomial { power, .. }) => {
                let q = power.max(0.0);
                let k = if q == 0.0 { 1.0 } else { (q / rate).powf(q) * (-q).exp() };
                Polynomial { power: q, scale: scale * k, from: *from }
            }
            _ => self.clone(),
        }
    }
}
