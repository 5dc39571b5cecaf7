use thiserror::Error;

/// Errors raised by ring arithmetic, the protocols, the attacks and the codec.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("raw matrix has shape {rows}x{cols}, expected {m}x{m}")]
    ShapeMismatch { rows: usize, cols: usize, m: usize },
    #[error("entry ({row},{col}) is not divisible by p^{power}")]
    DivisibilityViolation {
        row: usize,
        col: usize,
        power: usize,
    },
    #[error("operands belong to different rings")]
    ParamsMismatch,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("internal verification failed: {0}")]
    InternalVerificationFailure(String),
    #[error("no acceptable sample after {0} attempts")]
    ExhaustedRetries(usize),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("key failed validation: {0}")]
    InvalidKey(String),
    #[error("public base elements commute")]
    BadBase,
    #[error("bit string has {got} bits, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed bit string: {0}")]
    MalformedBits(String),
    #[error("message of {len} bytes exceeds capacity of {capacity} bytes")]
    MessageTooLong { len: usize, capacity: usize },
    #[error("malformed encoding: {0}")]
    Malformed(String),
    #[error("decoded value violates invariants: {0}")]
    InvariantViolation(String),
    #[error("expected record kind {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("oracle failed: {0}")]
    Oracle(String),
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI error channel.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::BadParameter(_) => "bad_parameter",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::DivisibilityViolation { .. } => "divisibility_violation",
            Error::ParamsMismatch => "params_mismatch",
            Error::NotInvertible => "not_invertible",
            Error::InternalVerificationFailure(_) => "internal_verification_failure",
            Error::ExhaustedRetries(_) => "exhausted_retries",
            Error::TooLarge(_) => "too_large",
            Error::InvalidKey(_) => "invalid_key",
            Error::BadBase => "bad_base",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::MalformedBits(_) => "malformed_bits",
            Error::MessageTooLong { .. } => "message_too_long",
            Error::Malformed(_) => "malformed",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::KindMismatch { .. } => "kind_mismatch",
            Error::Oracle(_) => "oracle_failure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
