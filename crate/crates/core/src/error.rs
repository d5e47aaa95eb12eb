use thiserror::Error;

use crate::stats::StatisticKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyNodeSet,

    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),

    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid block structure: {0}")]
    InvalidBlocks(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("statistic {kind:?} requires {expected} graph")]
    KindMismatch {
        kind: StatisticKind,
        expected: &'static str,
    },

    #[error("distribution undefined: {0}")]
    UndefinedDistribution(String),

    #[error("bin count mismatch: {0} vs {1}")]
    BinMismatch(usize, usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state space of 2^{bits} graphs exceeds the enumeration limit of 2^{limit}")]
    StateSpaceTooLarge { bits: usize, limit: usize },

    #[error("basis count is random under this distribution (edge counts {0} and {1} both occur); condition on a fixed edge count first")]
    RandomBasisCount(usize, usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
