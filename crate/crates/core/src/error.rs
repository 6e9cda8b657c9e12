use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} is outside the allowed range {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: String,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("generator matrix has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },

    #[error("exhaustive enumeration needs k <= {max}, code has k = {k}")]
    TooLargeForEnumeration { k: usize, max: usize },

    #[error("closed-form weight enumerator is not available for {0} codes")]
    NoClosedForm(&'static str),

    #[error("NaN in {0}")]
    NanInput(&'static str),

    #[error("root finding failed: {0}")]
    NoBracket(String),

    #[error("no positive growth detected on (0, 1/2) (epsilon {epsilon:e})")]
    NoPositiveGrowth { epsilon: f64 },

    #[error("no open EXIT tunnel in [{lo_db}, {hi_db}] dB")]
    NoOpenTunnel { lo_db: f64, hi_db: f64 },

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl ToString, range: &str) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            range: range.to_string(),
        }
    }
}
