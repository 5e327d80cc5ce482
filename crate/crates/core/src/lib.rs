//! Approximation by entire functions of exponential type in Muckenhoupt
//! weighted Lebesgue spaces on the line: quadrature, weights, Steklov
//! averages, de la Vallée Poussin band-limiting, transference functionals,
//! K-functionals and a registry of explicit-constant inequalities.

pub mod bandlimited;
pub mod cli;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod report;
pub mod smoothness;
pub mod steklov;
pub mod transference;
pub mod weights;

pub use error::{Error, Result};
