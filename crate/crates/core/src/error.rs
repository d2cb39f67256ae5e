use thiserror::Error;

/// Everything that can go wrong while building, validating, parsing or
/// scoring transcripts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("token {token:?} is empty or contains whitespace")]
    EmptyToken { token: String },

    #[error("invalid time interval [{begin}, {end}]: {reason}")]
    InvalidInterval { begin: f64, end: f64, reason: String },

    #[error("session {session:?}, stream {stream:?}: segment starting at {begin}s overlaps the previous segment ending at {previous_end}s")]
    OverlapWithinStream {
        session: String,
        stream: String,
        begin: f64,
        previous_end: f64,
    },

    #[error("missing timing: {context}")]
    MissingTiming { context: String },

    #[error("session {session:?} contains no words")]
    EmptySession { session: String },

    #[error("total reference length is zero but {errors} errors were counted; the error rate is undefined")]
    ZeroLengthReference { errors: u64 },

    #[error("invalid collar {0}: must be a nonnegative number or infinity")]
    InvalidCollar(f64),

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("cost matrix: {0}")]
    InvalidCostMatrix(String),

    #[error(
        "search space of {states} states exceeds the limit of {limit}; the multi-stream \
         matching grows with the product of utterance counts and stream lengths, so reduce \
         the number of output streams or raise the limit"
    )]
    StateSpaceTooLarge { states: u128, limit: u128 },

    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error("schema error at {location}: missing or invalid field {field:?}")]
    Schema { location: Location, field: String },

    #[error("invalid meeting spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for errors that stem from malformed input files rather than from
    /// violated scoring preconditions.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Schema { .. })
    }
}

/// Position of a diagnostic inside an input document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line number.
    Line(usize),
    /// 0-based index into a top-level JSON array.
    Record(usize),
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Record(n) => write!(f, "record {n}"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
