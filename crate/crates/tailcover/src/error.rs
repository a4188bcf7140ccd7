use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Variants are grouped roughly by pipeline stage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state length {got} does not match model size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("spin vector entry {value} at index {index} is not +1 or -1")]
    InvalidSpin { index: usize, value: i8 },

    #[error("bit vector entry {value} at index {index} is not 0 or 1")]
    InvalidBit { index: usize, value: u8 },

    #[error("model has zero variables")]
    EmptyModel,

    #[error("coupler index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("diagonal coupler ({i},{i}) is not allowed; use the linear bias")]
    DiagonalCoupler { i: usize },

    #[error("instance is invalid: {0}")]
    InvalidInstance(String),

    #[error("instance has no cost vector; attach costs before compiling with lambda != 0")]
    MissingCosts,

    #[error("cost weight lambda must be >= 0, got {0}")]
    NegativeLambda(f64),

    #[error("{context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("brute force supports at most 32 variables, got {0}")]
    BruteForceTooLarge(usize),

    #[error("invalid annealing parameters: {0}")]
    InvalidAnnealParams(String),

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("invalid topology parameters: {0}")]
    InvalidTopology(String),

    #[error("cannot parse topology spec '{0}' (expected e.g. 'chimera:16,16,4' or 'pegasus:16')")]
    BadTopologySpec(String),

    #[error("clique template: {needed} logical nodes exceed capacity {capacity} of the target graph")]
    CliqueCapacity { needed: usize, capacity: usize },

    #[error("clique template needs qubit {0}, which is absent from the target graph")]
    CliqueDeadNode(usize),

    #[error("no embedding found after {tries} tries")]
    NoEmbedding { tries: usize },

    #[error("embedding is invalid:\n{0}")]
    InvalidEmbedding(String),

    #[error("relative chain strength must be > 0, got {0}")]
    BadChainStrength(f64),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("invalid sweep config: {0}")]
    BadConfig(String),

    #[error("missing ground truth: pass --ground-energy or --instance")]
    NoGroundTruth,

    #[error("parse error in {path} line {line}: {message}")]
    ParseModel {
        path: String,
        line: usize,
        message: String,
    },

    #[error("bad records file {path} line {line}: {message}")]
    ParseRecords {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
