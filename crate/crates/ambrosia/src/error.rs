use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty series")]
    EmptySeries,

    #[error("non-finite value at line {line}: {raw:?}")]
    NonFiniteValue { line: usize, raw: String },

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("anomaly index {index} out of range for series of length {len}")]
    AnomalyIndexOutOfRange { index: usize, len: usize },

    #[error("insufficient history: need {need} observations, have {have}")]
    InsufficientHistory { need: usize, have: usize },

    #[error("model not fitted")]
    NotFitted,

    #[error("non-finite input value at index {0}")]
    NonFiniteInput(u64),

    #[error("series too short: length {len} must exceed bootstrap {bootstrap}")]
    SeriesTooShort { len: usize, bootstrap: usize },

    #[error("stream corruption: {0}")]
    StreamCorruption(String),

    #[error("channel saturated: transmit time {t_tx:.3} s exceeds interval {ti:.3} s")]
    ChannelSaturated { t_tx: f64, ti: f64 },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("unknown radio technology {name:?}; valid: {valid}")]
    UnknownTech { name: String, valid: String },

    #[error("point dimension {got} does not match tree dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("point not present in tree")]
    PointAbsent,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
