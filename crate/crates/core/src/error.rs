use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation was called with arguments it does not accept.
    #[error("usage error: {0}")]
    Usage(String),

    /// The physical parameter relations do not hold.
    #[error("physical constraint violated: {0}")]
    Constraint(String),

    /// A residual term came out without the common `sn*dn` factor.
    #[error("residual does not factor through sn*dn: {0}")]
    Factorization(String),

    /// A forced-vanishing chain could not be carried to the expected shape.
    #[error("termination chain broken: {0}")]
    ChainBroken(String),

    #[error("system is underdetermined: {deficit} more unknowns than equations")]
    Underdetermined { deficit: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("Jacobian is singular (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
