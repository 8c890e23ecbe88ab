use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("unsupported dimension {0} (expected 1 or 2)")]
    UnsupportedDim(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("bandwidth mismatch: {0} vs {1}")]
    BandwidthMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value while evaluating the nonlinearity")]
    NonFinite,

    #[error("blow-up detected at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error("malformed csv at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
