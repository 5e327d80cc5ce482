use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subdivision budget ({limit} panels) exhausted on [{a}, {b}]: error estimate {err:e} above tolerance {tol:e}")]
    BudgetExhausted {
        a: f64,
        b: f64,
        limit: usize,
        err: f64,
        tol: f64,
    },
    #[error("integrand returned {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    #[error("tail integral diverges (polynomial envelope with power {power})")]
    TailUnbounded { power: f64 },
    #[error("weight is not in A_{p}")]
    NotInAp { p: f64 },
    #[error("function has zero norm")]
    ZeroFunction,
    #[error("sampling grid too coarse: Nyquist frequency {nyquist} below required {required}")]
    GridTooCoarse { nyquist: f64, required: f64 },
    #[error("coefficient search did not converge after {restarts} restarts")]
    NoConvergence { restarts: usize },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
