use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tail tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),

    #[error("truncation n_max = {required} exceeds the hard cap {cap}")]
    TruncationCap { required: usize, cap: usize },

    #[error("index out of range: d^{n}_{{{row},{col}}} requires 0 <= row, col <= {n}")]
    IndexOutOfRange { n: usize, row: usize, col: usize },

    #[error("block N = {n} exceeds the oracle cap {cap} (set POLARQ_ORACLE_CAP to raise it)")]
    OracleCap { n: usize, cap: usize },

    #[error("ordering parameter s = {0} outside [-1, 0]")]
    OrderingOutOfRange(f64),

    #[error(
        "double-sum evaluation refused at theta = {theta} (|cos theta| < {guard}); use the triple sum"
    )]
    EquatorGuard { theta: f64, guard: f64 },

    #[error("normalized distribution undefined for mean excitation {0}")]
    ZeroMeanExcitation(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("grid: {0}")]
    InvalidGrid(String),

    #[error("field kind mismatch: expected {expected}, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },
}
