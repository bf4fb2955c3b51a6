use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration limit exceeded: n = {n}, cap = {cap}")]
    EnumerationLimit { n: usize, cap: usize },

    #[error("length {len} exceeds the cap of {cap} for {what}")]
    LengthCap {
        what: &'static str,
        len: usize,
        cap: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("label {label} out of range for {size} labels")]
    LabelOutOfRange { label: usize, size: usize },

    #[error("self-loop on label {0} in independence pair list")]
    SelfLoop(usize),

    #[error("matrix is not a symmetric 0/1 matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid set partition: {0}")]
    InvalidPartition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no distribution for label {0}")]
    MissingTable(usize),

    #[error("label {label}: order {order} requested but table only reaches order {max}")]
    OrderOverflow {
        label: usize,
        order: usize,
        max: usize,
    },

    #[error("label {label}: {table} cumulant table used with diagonal convention {diagonal}")]
    KindMismatch {
        label: usize,
        table: &'static str,
        diagonal: u8,
    },

    #[error("empty input sequence")]
    EmptyInput,

    #[error("joint moment oracle covers words up to length {available}, but {needed} is needed")]
    OracleOrder { needed: usize, available: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
