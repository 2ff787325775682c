use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty string has no runs")]
    EmptyString,

    #[error("invalid character {ch:?} at index {index}; expected '0' or '1'")]
    InvalidBitChar { ch: char, index: usize },

    #[error("invalid run profile: {0}")]
    InvalidRunProfile(String),

    #[error("invalid pattern span: {0}")]
    InvalidSpan(String),

    #[error("invalid class spec: {0}")]
    InvalidClassSpec(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("degenerate channel: p = {0} must lie strictly between 0 and 1")]
    DegenerateChannel(f64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty trace set has undefined sufficiency")]
    EmptyTraceSet,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("n = {n} exceeds the brute-force oracle cap {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("traces inconsistent with source: trace {0} is not a subsequence of s")]
    InconsistentTraces(usize),

    #[error("declared pattern absent from s: {0}")]
    PatternAbsent(String),

    #[error("invalid pattern declaration: {0}")]
    InvalidPattern(String),

    #[error("too many runs for the subset sum: M = {m} exceeds {cap}")]
    TooManyRuns { m: usize, cap: usize },

    #[error("trace count {t} exceeds the direct-sum cap {cap}")]
    TraceCountCap { t: u64, cap: u64 },

    #[error("invalid trace count: {0}")]
    InvalidTraceCount(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ratio undefined: {0}")]
    RatioUndefined(String),
}
