use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trace exhausted: task `{task}` arm {arm} repetition {repetition} has no reward at position {position}")]
    TraceExhausted {
        task: String,
        arm: usize,
        repetition: u32,
        position: usize,
    },

    #[error("trace `{task}` has no repetition {repetition} for arm {arm}")]
    MissingRepetition {
        task: String,
        arm: usize,
        repetition: u32,
    },

    #[error("arm {arm} out of range for an environment with {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },

    #[error("non-finite reward {value} from arm {arm}")]
    NonFiniteReward { arm: usize, value: f64 },

    #[error("{path}:{line}: {kind}")]
    TraceFormat {
        path: PathBuf,
        line: usize,
        kind: TraceFormatError,
    },

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("not implemented: external baseline `{name}`; defaults available in BaselineDefaults ({defaults})")]
    ExternalBaseline { name: String, defaults: String },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("ragged input: {0}")]
    Ragged(String),

    #[error("{0}")]
    Results(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Line-level problems found while loading a trace CSV.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceFormatError {
    #[error("expected header `arm_id,repetition,iteration,loss`, found `{0}`")]
    BadHeader(String),
    #[error("missing columns: expected 4 fields, found {0}")]
    MissingColumns(usize),
    #[error("malformed row: {0}")]
    MalformedRow(String),
    #[error("non-finite loss `{0}`")]
    NonFiniteLoss(String),
    #[error("duplicate key (arm {arm}, repetition {repetition}, iteration {iteration})")]
    DuplicateKey {
        arm: usize,
        repetition: u32,
        iteration: usize,
    },
    #[error("iteration gap for arm {arm} repetition {repetition}: expected {expected}, found {found}")]
    IterationGap {
        arm: usize,
        repetition: u32,
        expected: usize,
        found: usize,
    },
    #[error("arm {0} has no rows (arm ids must be contiguous from 0)")]
    MissingArm(usize),
    #[error("empty trace file")]
    Empty,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Domain(_)
            | Error::UnknownPolicy(_)
            | Error::ExternalBaseline { .. }
            | Error::Io { .. } => 2,
            Error::TraceExhausted { .. }
            | Error::MissingRepetition { .. }
            | Error::ArmOutOfRange { .. }
            | Error::NonFiniteReward { .. }
            | Error::TraceFormat { .. } => 3,
            _ => 1,
        }
    }
}
