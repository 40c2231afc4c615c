//! Error type shared by all engines.

/// Failure modes of the verification engines.
///
/// `PrecisionExhausted` is recoverable: the local engine retries the affected
/// modulus factor with doubled padding and records the retry in the report.
/// Everything else aborts the instance.
#[derive(Debug, Clone, thiserror::Error)]
pub enum QdError {
    #[error("zero divisor")]
    ZeroDivisor,

    #[error("non-unit inversion modulo Phi_{n}^{w}")]
    NonUnitInversion { n: u64, w: usize },

    #[error("precision exhausted at Phi_{n}: need {needed} digits, have {have}")]
    PrecisionExhausted { n: u64, needed: i64, have: i64 },

    #[error("malformed statement instance: {0}")]
    MalformedInstance(String),

    #[error("unknown statement id: {0}")]
    UnknownStatement(String),

    #[error("constraint violation for {id}: {reason}")]
    ConstraintViolation { id: String, reason: String },

    #[error("degree budget exceeded: predicted {predicted}, budget {budget}")]
    DegreeBudget { predicted: u64, budget: u64 },

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("config error: {0}")]
    Config(String),
}
