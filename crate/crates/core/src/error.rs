use thiserror::Error;

/// Errors raised anywhere in the trace pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precision bits must be >= 64 and guard bits >= 16 (got {bits}/{guard_bits})")]
    InvalidPrecision { bits: u32, guard_bits: u32 },

    #[error("modulus {0} is not of the form 4N")]
    InvalidModulus(u64),

    #[error("-{0} is not a discriminant (must be 0 or 3 mod 4)")]
    InvalidDiscriminant(u64),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("{delta} is not a square modulo 4*{level} (root {root})")]
    BadRoot { delta: i64, level: u64, root: i64 },

    #[error("-{disc} is not a square modulo 4*{level}: Q_(D,N) is empty")]
    NoSquareRoot { disc: u64, level: u64 },

    #[error("ball contains zero; cannot invert")]
    ContainsZero,

    #[error("ball meets the branch cut of the square root")]
    BranchCut,

    #[error("point is not in the upper half plane")]
    NotInUpperHalfPlane,

    #[error("fundamental-domain reduction did not terminate within {0} steps")]
    ReductionDiverged(usize),

    #[error("no rational with denominator <= {max_den} in the certified interval")]
    RecognitionFailed { max_den: u64 },

    #[error("precision cap of {cap} bits exhausted{}", .context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    PrecisionExhausted { cap: u32, context: Option<String> },

    #[error("genus character search exhausted its budget (bound {bound}) for form {form}")]
    CharacterBudget { bound: i64, form: String },

    #[error("form {0} does not satisfy N | a")]
    NotOnLevel(String),

    #[error("scale {scale} does not divide level {level}")]
    BadScale { scale: u64, level: u64 },

    #[error("unsupported expression: {0}")]
    Unsupported(String),

    #[error("series is not invertible (lowest coefficient is zero or precision exhausted)")]
    NotInvertible,

    #[error("coefficient of q^{0} is not integral")]
    NonIntegral(i64),

    #[error("pole order {pole} exceeds the cusp-form budget of Delta^{m}")]
    PoleTooLarge { pole: i64, m: u32 },

    #[error("trace index {0} is missing from the table")]
    MissingIndex(i64),

    #[error("untwisted constant term at level {0} is not supported")]
    ConstantTermUnsupported(u64),

    #[error("trace at index {0} is not rational")]
    NonRational(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("cache I/O: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
