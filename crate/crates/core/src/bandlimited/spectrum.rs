use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numerics::RealFunction;

/// Uniform sampling of `[-half_width, half_width)` for spectral estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumGrid {
    pub samples: usize,
    pub half_width: f64,
    /// Fraction of total energy allowed above the returned frequency.
    pub energy_fraction: f64,
}

impl Default for SpectrumGrid {
    fn default() -> Self {
        SpectrumGrid {
            samples: 1 << 14,
            half_width: 256.0,
            energy_fraction: 1e-3,
        }
    }
}

impl SpectrumGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    /// Angular Nyquist frequency `π/h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }
}

/// Smallest angular frequency above which the Hann-windowed discrete
/// spectrum of `g` carries less than `energy_fraction` of the total energy.
pub fn exp_type_estimate(g: &RealFunction, sigma_probe: f64, grid: &SpectrumGrid) -> Result<f64> {
    if grid.nyquist() < 4.0 * sigma_probe {
        return Err(Error::GridTooCoarse {
            nyquist: grid.nyquist(),
            required: 4.0 * sigma_probe,
        });
    }
    let m = grid.samples;
    let h = grid.spacing();
    let mut buf = Vec::with_capacity(m);
    for i in 0..m {
        let x = -grid.half_width + i as f64 * h;
        let w = (PI * i as f64 / m as f64).sin().powi(2);
        buf.push(Complex::new(g.eval(x)? * w, 0.0));
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    let mut energy = vec![0.0; half + 1];
    for (k, e) in energy.iter_mut().enumerate() {
        *e = buf[k].norm_sqr();
        if k > 0 && k < half {
            *e += buf[m - k].norm_sqr();
        }
    }
    let total: f64 = energy.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let dw = 2.0 * PI / (m as f64 * h);
    let mut above = 0.0;
    for k in (0..=half).rev() {
        if above + energy[k] >= grid.energy_fraction * total {
            return Ok(k as f64 * dw);
        }
        above += energy[k];
    }
    Ok(0.0)
}
