//! Functions of exponential type and the de la Vallée Poussin operator.

mod deviation;
mod sinc;
mod spectrum;
mod vp;

pub use deviation::{deviation_oracle, deviation_upper, DeviationEstimate, DeviationMethod, OracleConfig};
pub use sinc::{sinc_derivatives, SincExpansion};
pub use spectrum::{exp_type_estimate, SpectrumGrid};
pub use vp::{vp_approx, vp_approx_with_derivatives, vp_kernel};
