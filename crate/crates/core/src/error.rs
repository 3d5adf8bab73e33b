use thiserror::Error;

/// Every failure the library can report.
///
/// Variants map one-to-one onto the machine-readable codes emitted by the
/// command line tool (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex index {0} is out of range")]
    InvalidVertex(usize),
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("graph input is malformed at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph is invalid: {0}")]
    InvalidGraph(String),
    #[error("vertex set is not gated from vertex {0}")]
    NotGated(usize),
    #[error("consecutive vertices {0} and {1} are not adjacent")]
    NotAWalk(usize, usize),
    #[error("path is not a geodesic")]
    NotGeodesic,
    #[error("path does not start at the root")]
    NotFromRoot,
    #[error("graph is not paraclique: {0}")]
    NotParaclique(String),
    #[error("verdict for hyperplanes {0} and {1} is unreliable near the ball frontier")]
    TruncatedPair(usize, usize),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("no greatest lower bound exists: {0}")]
    NoMeet(String),
    #[error("diagonal entry for generator `{0}` must be 1")]
    BadDiagonal(String),
    #[error("label matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("label {value} at ({row}, {col}) must be at least 2 (or 0 for infinity)")]
    BadLabel { row: usize, col: usize, value: u32 },
    #[error("Coxeter system is malformed: {0}")]
    BadSystem(String),
    #[error("unknown generator in word `{0}`")]
    BadWord(String),
    #[error("interval arithmetic could not separate the sign at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("braid closure exceeded the budget of {budget} words")]
    BraidClosureOverflow { budget: usize },
    #[error("ball exceeded the budget of {budget} vertices")]
    BallTooLarge { budget: usize },
    #[error("element has finite order {order}")]
    FiniteOrderElement { order: usize },
    #[error("no connector satisfies the bounded projection condition between letters {0} and {1}")]
    AllCandidatesRejected(usize, usize),
    #[error("iteration left the ball after step {last_valid}")]
    DomainExceeded { last_valid: usize },
    #[error("scenario is invalid: {0}")]
    BadScenario(String),
    #[error("unsupported export format `{0}`")]
    UnsupportedFormat(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier written into error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidVertex(_) => "InvalidVertex",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::Parse { .. } => "Parse",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::NotGated(_) => "NotGated",
            Error::NotAWalk(..) => "NotAWalk",
            Error::NotGeodesic => "NotGeodesic",
            Error::NotFromRoot => "NotFromRoot",
            Error::NotParaclique(_) => "NotParaclique",
            Error::TruncatedPair(..) => "TruncatedPair",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::NoMeet(_) => "NoMeet",
            Error::BadDiagonal(_) => "BadDiagonal",
            Error::Asymmetric(..) => "Asymmetric",
            Error::BadLabel { .. } => "BadLabel",
            Error::BadSystem(_) => "BadSystem",
            Error::BadWord(_) => "BadWord",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::BraidClosureOverflow { .. } => "BraidClosureOverflow",
            Error::BallTooLarge { .. } => "BallTooLarge",
            Error::FiniteOrderElement { .. } => "FiniteOrderElement",
            Error::AllCandidatesRejected(..) => "AllCandidatesRejected",
            Error::DomainExceeded { .. } => "DomainExceeded",
            Error::BadScenario(_) => "BadScenario",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::Io(_) => "Io",
        }
    }

    /// Library module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidVertex(_)
            | Error::UnknownLabel(_)
            | Error::Parse { .. }
            | Error::InvalidGraph(_)
            | Error::NotGated(_)
            | Error::NotAWalk(..) => "graph",
            Error::NotGeodesic
            | Error::NotParaclique(_)
            | Error::TruncatedPair(..) => "walls",
            Error::NoMeet(_) => "order",
            Error::BadDiagonal(_)
            | Error::Asymmetric(..)
            | Error::BadLabel { .. }
            | Error::BadSystem(_)
            | Error::BadWord(_)
            | Error::PrecisionExhausted { .. }
            | Error::BraidClosureOverflow { .. }
            | Error::BallTooLarge { .. } => "coxeter",
            Error::FiniteOrderElement { .. }
            | Error::AllCandidatesRejected(..)
            | Error::DomainExceeded { .. } => "dynamics",
            Error::NotFromRoot => "boundary",
            Error::InternalInconsistency(_) => "internal",
            Error::UnsupportedFormat(_) | Error::Io(_) => "export",
            Error::BadScenario(_) => "cli",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
