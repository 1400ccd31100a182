use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: need more than {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("non-finite value at position {index}")]
    NonFiniteValue { index: usize },

    #[error("invalid frequency {0}: must be at least 1")]
    InvalidFrequency(usize),

    #[error("invalid start ({cycle}, {phase}) for frequency {frequency}")]
    InvalidStart { cycle: i64, phase: usize, frequency: usize },

    #[error("invalid lags: {0}")]
    InvalidLags(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("multiplicative transform undefined: feature mean of example {row} is zero")]
    ZeroFeatureMean { row: usize },

    #[error("trend spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("MASE scale is zero: the in-sample seasonal naive error vanishes")]
    DegenerateScale,

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-finite value at line {line}")]
    NonFiniteInput { line: usize },

    #[error("duplicate series name `{0}`")]
    DuplicateSeriesName(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors raised while reading or decoding input files.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::NonFiniteInput { .. }
                | Error::DuplicateSeriesName(_)
                | Error::EmptyDataset
                | Error::ModelFormat(_)
                | Error::Io(_)
        )
    }
}
