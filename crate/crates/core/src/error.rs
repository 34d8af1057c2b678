use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("p-adic context mismatch")]
    ContextMismatch,
    #[error("element of valuation {0} is not a unit")]
    NotAUnit(u32),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not distinguished")]
    NotDistinguished,
    #[error("degree cap {cap} too small, need at least {needed}")]
    InsufficientDegreeCap { cap: usize, needed: usize },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("bad levels: {0}")]
    BadLevels(String),
    #[error("subgroup is not stable under T")]
    NotTStable,
    #[error("elements do not form a p-base")]
    NotAPBase,
    #[error("invalid summand: {0}")]
    InvalidSummand(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("inconsistent series: {0}")]
    InconsistentSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
