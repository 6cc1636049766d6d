use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidContext(String),

    #[error("invalid parameter set: {0}")]
    InvalidParameters(String),

    #[error("need {needed} basis slots, parameter set has {available}")]
    InsufficientParameters { needed: usize, available: usize },

    #[error("parameters {a} and {b} are closer than the confluence threshold; merge them into one entry")]
    Confluence { a: f64, b: f64 },

    #[error("{what} did not converge")]
    NonConvergence { what: String },

    #[error("precision budget exceeded: {0}")]
    PrecisionBudget(String),

    #[error("Chebyshev algorithm broke down at k = {k} (non-positive beta)")]
    Breakdown { k: usize },

    #[error("singular linear system ({0})")]
    Singular(String),

    #[error("exactness audit failed: max residual {max_residual:e} exceeds {tolerance:e}")]
    AuditFailed { max_residual: f64, tolerance: f64 },

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("precision escalation exhausted at {bits} bits: {cause}")]
    EscalationExhausted { bits: u32, cause: Box<Error> },

    #[error("orthogonal rule weights require t_1 = 0 in strict mode (got t_1 = {0})")]
    StrictOrthogonal(f64),

    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),

    #[error("exact value is zero; relative error undefined")]
    ZeroExact,

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Failures that can be cured by rerunning with more working precision.
    pub fn is_precision_issue(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::PrecisionBudget(_)
                | Error::Breakdown { .. }
                | Error::Singular(_)
                | Error::AuditFailed { .. }
                | Error::InvalidRule(_)
        )
    }
}
