use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not Hermitian (relative residual {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("function undefined on spectrum at eigenvalue {0:e}")]
    UndefinedOnSpectrum(f64),
    #[error("state is not faithful: min eigenvalue {min:e}, max eigenvalue {max:e}")]
    NotFaithful { min: f64, max: f64 },
    #[error("state is not normalized: trace {0}")]
    NotNormalized(f64),
    #[error("vector is not J-real (residual {0:e})")]
    NotJReal(f64),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not Markovian: {reason}")]
    NotMarkovian { reason: String, witness: serde_json::Value },
    #[error("form is not conservative: E[xi_omega] = {0:e}")]
    NotConservative(f64),
    #[error("quadrature tail bound {bound:e} exceeds tolerance; try T >= {suggested_t}")]
    QuadratureTail { bound: f64, suggested_t: f64 },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
