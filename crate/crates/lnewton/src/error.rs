use thiserror::Error;

/// Crate-wide error type; variant names mirror the failure modes of the
/// individual modules so CLI output can carry machine-readable codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a prime: {0}")]
    InvalidPrime(u64),
    #[error("size budget exceeded: {0}")]
    SizeExceeded(String),
    #[error("sub-degree {sub} does not divide extension degree {k}")]
    InvalidSubfield { sub: u32, k: u32 },
    #[error("zero argument where a nonzero element is required")]
    ZeroArgument,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cyclotomic prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("value is not integral")]
    NotIntegral,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("series has a nonzero constant term")]
    InvalidConstantTerm,
    #[error("series constant term is not invertible")]
    NotInvertible,
    #[error("degree anomaly: {0}")]
    DegreeAnomaly(String),
    #[error("exact division failed: {0}")]
    NotDivisible(String),
    #[error("empty input")]
    EmptyInput,
    #[error("polynomial is not diagonal")]
    NotDiagonal,
    #[error("truncation too coarse: {0}")]
    InsufficientTruncation(String),
    #[error("solution set is not closed under the q-action")]
    NotClosed,
    #[error("parameter regime violated: {0}")]
    RegimeError(String),
    #[error("impossible term reached (enumeration bug): {0}")]
    ImpossibleTerm(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("internal error: {0}")]
    InternalError(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("unknown reproduction suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable code for CLI/JSON output.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidPrime(_) => "invalid_prime",
            SizeExceeded(_) => "size_exceeded",
            InvalidSubfield { .. } => "invalid_subfield",
            ZeroArgument => "zero_argument",
            Unsupported(_) => "unsupported",
            PrimeMismatch(_, _) => "prime_mismatch",
            NotIntegral => "not_integral",
            PrecisionExhausted(_) => "precision_exhausted",
            InvalidConstantTerm => "invalid_constant_term",
            NotInvertible => "not_invertible",
            DegreeAnomaly(_) => "degree_anomaly",
            NotDivisible(_) => "not_divisible",
            EmptyInput => "empty_input",
            NotDiagonal => "not_diagonal",
            InsufficientTruncation(_) => "insufficient_truncation",
            NotClosed => "not_closed",
            RegimeError(_) => "regime_error",
            ImpossibleTerm(_) => "impossible_term",
            Inconclusive(_) => "inconclusive",
            HypothesisFailed(_) => "hypothesis_failed",
            IdentityViolation(_) => "identity_violation",
            InternalError(_) => "internal_error",
            InvalidArgument(_) => "invalid_argument",
            ParseError { .. } => "parse_error",
            UnknownSuite(_) => "unknown_suite",
        }
    }
}
