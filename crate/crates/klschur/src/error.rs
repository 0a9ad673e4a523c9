use thiserror::Error;

/// Errors shared across the crate's modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("invalid window {0}: {1}")]
    InvalidWindow(String, String),

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("parabolic subset {0} generates an infinite subgroup")]
    InfiniteParabolic(String),

    #[error("{0} is not a minimal coset representative for {1}")]
    NotMinimalRep(String, String),

    #[error("weight {0} is not antidominant")]
    NotAntidominant(String),

    #[error("orbit mismatch: {target} does not lie in the orbit of {anchor} ({reason})")]
    OrbitMismatch {
        target: String,
        anchor: String,
        reason: String,
    },

    #[error("component {component} of {label} has {rows} rows, exceeding m = {bound}")]
    RowOverflow {
        label: String,
        component: usize,
        rows: usize,
        bound: usize,
    },

    #[error("block invariant violated: {0}")]
    BlockInvariant(String),

    #[error("parse error in {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("computation too large: {0}")]
    TooLarge(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
