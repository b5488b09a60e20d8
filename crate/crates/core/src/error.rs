use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid hypothesis: {0}")]
    InvalidHypothesis(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("instance matches no hypothesis of the problem")]
    NoMatchingHypothesis,

    #[error("instance matches {count} hypotheses (first two: {first}, {second})")]
    AmbiguousHypothesis {
        count: usize,
        first: usize,
        second: usize,
    },

    #[error("problem has a single hypothesis; no alternative exists")]
    NoAlternative,

    #[error("weights are all zero")]
    ZeroWeights,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("minimum probability is zero; constants are undefined")]
    ZeroMinProbability,

    #[error("non-finite payoff entry at ({row}, {col})")]
    NonFinitePayoff { row: usize, col: usize },

    #[error("arm {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },

    #[error("cap {cap} is smaller than the number of arms {num_arms}")]
    CapTooSmall { cap: u64, num_arms: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
