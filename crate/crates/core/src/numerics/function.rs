use std::fmt;
use std::sync::Arc;

use super::envelope::Envelope;
use crate::error::Result;

pub type EvalFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A real function on the line with a decay envelope, known non-smooth
/// points and an optional stack of exact derivatives.
#[derive(Clone)]
pub struct RealFunction {
    eval: EvalFn,
    envelope: Envelope,
    /// `derivatives[j]` is the `(j+1)`-th derivative.
    derivatives: Vec<RealFunction>,
    breakpoints: Vec<f64>,
    label: String,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("label", &self.label)
            .field("envelope", &self.envelope)
            .field("derivatives", &self.derivatives.len())
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

fn normalize(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|x| x.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

impl RealFunction {
    pub fn new(label: impl Into<String>, envelope: Envelope, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::fallible(label, envelope, move |x| Ok(f(x)))
    }

    pub fn fallible(
        label: impl Into<String>,
        envelope: Envelope,
        f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        RealFunction {
            eval: Arc::new(f),
            envelope,
            derivatives: Vec::new(),
            breakpoints: Vec::new(),
            label: label.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new("0", Envelope::compact(0.0, 0.0), |_| 0.0)
    }

    pub fn with_breakpoints(mut self, pts: Vec<f64>) -> Self {
        self.breakpoints = normalize(pts);
        self
    }

    pub fn with_derivatives(mut self, ds: Vec<RealFunction>) -> Self {
        self.derivatives = ds;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> Result<f64> {
        (self.eval)(x)
    }

    pub fn evaluator(&self) -> EvalFn {
        self.eval.clone()
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Highest order of exact derivative available.
    pub fn derivative_order(&self) -> usize {
        self.derivatives.len()
    }

    /// Exact `k`-th derivative (`k = 0` returns the function itself).
    pub fn derivative(&self, k: usize) -> Option<RealFunction> {
        if k == 0 {
            Some(self.clone())
        } else {
            self.derivatives.get(k - 1).cloned()
        }
    }

    /// `x ↦ c f(x)`.
    pub fn scaled(&self, c: f64) -> Self {
        let e = self.eval.clone();
        RealFunction {
            eval: Arc::new(move |x| Ok(c * e(x)?)),
            envelope: self.envelope.scaled(c),
            derivatives: self.derivatives.iter().map(|d| d.scaled(c)).collect(),
            breakpoints: self.breakpoints.clone(),
            label: format!("{c}*{}", self.label),
        }
    }

    /// `Σ c_i f_i`; derivatives are kept up to the smallest common order.
    pub fn combination(terms: &[(f64, RealFunction)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let evals: Vec<(f64, EvalFn)> = terms.iter().map(|(c, f)| (*c, f.eval.clone())).collect();
        let envelope = terms
            .iter()
            .map(|(c, f)| f.envelope.scaled(*c))
            .reduce(|a, b| a.sum(&b))
            .unwrap();
        let order = terms.iter().map(|(_, f)| f.derivative_order()).min().unwrap_or(0);
        let derivatives = (1..=order)
            .map(|k| {
                let dk: Vec<(f64, RealFunction)> = terms.iter().map(|(c, f)| (*c, f.derivatives[k - 1].clone())).collect();
                Self::combination(&dk)
            })
            .collect();
        let breakpoints = normalize(terms.iter().flat_map(|(_, f)| f.breakpoints.iter().copied()).collect());
        let label = terms
            .iter()
            .map(|(c, f)| format!("{c}*{}", f.label))
            .collect::<Vec<_>>()
            .join("+");
        RealFunction {
            eval: Arc::new(move |x| {
                let mut s = 0.0;
                for (c, e) in &evals {
                    s += c * e(x)?;
                }
                Ok(s)
            }),
            envelope,
            derivatives,
            breakpoints,
            label,
        }
    }

    pub fn add(&self, other: &RealFunction) -> Self {
        Self::combination(&[(1.0, self.clone()), (1.0, other.clone())])
    }

    pub fn sub(&self, other: &RealFunction) -> Self {
        Self::combination(&[(1.0, self.clone()), (-1.0, other.clone())])
    }

    /// `|f|` (derivatives dropped).
    pub fn abs(&self) -> Self {
        let e = self.eval.clone();
        RealFunction {
            eval: Arc::new(move |x| Ok(e(x)?.abs())),
            envelope: self.envelope.clone(),
            derivatives: Vec::new(),
            breakpoints: self.breakpoints.clone(),
            label: format!("|{}|", self.label),
        }
    }

    /// `x ↦ f(x - c)`.
    pub fn translated(&self, c: f64) -> Self {
        let e = self.eval.clone();
        RealFunction {
            eval: Arc::new(move |x| e(x - c)),
            envelope: self.envelope.translate(c),
            derivatives: self.derivatives.iter().map(|d| d.translated(c)).collect(),
            breakpoints: self.breakpoints.iter().map(|b| b + c).collect(),
            label: format!("{}(.-{c})", self.label),
        }
    }

    /// Compares each declared derivative with a central difference of the
    /// previous order on `grid`; returns the worst relative discrepancy.
    pub fn derivative_discrepancy(&self, grid: &[f64], h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 1..=self.derivative_order() {
            let lower = self.derivative(k - 1).unwrap();
            let exact = self.derivative(k).unwrap();
            for &x in grid {
                let near_break = lower.breakpoints().iter().any(|b| (b - x).abs() <= 2.0 * h);
                if near_break {
                    continue;
                }
                let fd = (lower.eval(x + h)? - lower.eval(x - h)?) / (2.0 * h);
                let ex = exact.eval(x)?;
                let scale = ex.abs().max(fd.abs()).max(1e-3);
                worst = worst.max((fd - ex).abs() / scale);
            }
        }
        Ok(worst)
    }
}
