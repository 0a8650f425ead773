use thiserror::Error;

/// Errors produced anywhere in the evaluation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FairnessError {
    #[error("score {score} is outside [0, 1]")]
    ScoreOutOfRange { score: f64 },

    #[error("demographic label must be non-empty")]
    EmptyLabel,

    #[error("empty input: no score records")]
    EmptyInput,

    #[error("K must be ≥ 2 (found {found} demographic group(s))")]
    TooFewGroups { found: usize },

    #[error("group '{group}' has {genuine} genuine and {imposter} imposter scores; at least 2 of each are required")]
    InsufficientScores {
        group: String,
        genuine: usize,
        imposter: usize,
    },

    #[error("duplicate group label '{0}'")]
    DuplicateGroup(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("subject '{subject}' appears with demographics '{first}' and '{second}'")]
    InconsistentSubject {
        subject: String,
        first: String,
        second: String,
    },

    #[error("min-max normalization needs non-constant scores (all scores equal {value})")]
    ConstantScores { value: f64 },

    #[error("histogram length mismatch: {left} vs {right} bins")]
    BinMismatch { left: usize, right: usize },

    #[error("bin count must be ≥ 2, got {0}")]
    InvalidBinCount(usize),

    #[error("KL divergence undefined: bin {bin} has mass {mass} in the first histogram and none in the second")]
    DivergenceUndefined { bin: usize, mass: f64 },

    #[error("group size must be positive (group {index} has size 0)")]
    ZeroGroupSize { index: usize },

    #[error("invalid weight parameter: {0}")]
    InvalidWeightParam(String),

    #[error("subject counts are unavailable for this dataset; use the records ratio basis")]
    SubjectCountsUnavailable,

    #[error("invalid scenario preset: {0}")]
    InvalidPreset(String),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = FairnessError> = std::result::Result<T, E>;
