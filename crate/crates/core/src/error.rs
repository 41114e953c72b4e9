use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty support")]
    EmptySupport,

    #[error("parameter `{name}` = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error(
        "jointly typical set is empty (n = {n}, delta = {delta}, eps = {eps}, window = {window:.6}, \
         retained mass = {retained_mass:.6})"
    )]
    EmptyTypicalSet {
        n: usize,
        delta: f64,
        eps: f64,
        window: f64,
        retained_mass: f64,
    },

    #[error("marginal constraints are infeasible on the given support")]
    Infeasible,

    #[error("{what}: size {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("reference distribution vanishes on a supported flag ({0})")]
    ReferenceSupport(String),

    #[error("unsupported party count k = {k} ({reason})")]
    UnsupportedK { k: usize, reason: &'static str },

    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
}
