use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Values are carried as `f64` regardless of the working scalar so that
/// reports stay printable.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("pole of the gamma function at z = {0}")]
    Pole(f64),
    #[error("quadrature failed to reach tolerance (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("root bracketing failed: {0}")]
    Root(String),
    #[error("log-modulus {log_modulus:.3} exceeds overflow cap {cap:.1}")]
    Overflow { log_modulus: f64, cap: f64 },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("non-integrable endpoint singularity: exponent {0} <= -1")]
    Singularity(f64),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for errors that mean "the request lies outside what can be
    /// evaluated", as opposed to a numerical method giving up.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Range(_)
                | Error::Pole(_)
                | Error::Grid(_)
                | Error::Singularity(_)
                | Error::InvalidSpec(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
