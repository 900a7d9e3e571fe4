use thiserror::Error;

/// Crate-wide error type. `kind()` yields the stable machine-readable name
/// that the CLI writes into its JSON `error.kind` field.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("triangular factor is singular at diagonal index {index}")]
    SingularTriangular { index: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank-deficient anchor: {0}")]
    RankDeficientAnchor(String),
    #[error("requested rank {requested} exceeds available rank {available}")]
    RankTooLarge { requested: usize, available: usize },
    #[error("linear system is inconsistent: {0}")]
    InconsistentSystem(String),
    #[error("index {index} out of range for axis of length {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("duplicate index {index}")]
    DuplicateIndex { index: usize },
    #[error("pivot breakdown: {0}")]
    PivotBreakdown(String),
    #[error("mixing matrix is singular: {0}")]
    SingularMixing(String),
    #[error("middle matrix is singular: {0}")]
    SingularMiddle(String),
    #[error("factor is not full rank: {0}")]
    NotFullRank(String),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::NonFiniteInput(_) => "NonFiniteInput",
            Error::NotSquare { .. } => "NotSquare",
            Error::SingularTriangular { .. } => "SingularTriangular",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::RankDeficientAnchor(_) => "RankDeficientAnchor",
            Error::RankTooLarge { .. } => "RankTooLarge",
            Error::InconsistentSystem(_) => "InconsistentSystem",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DuplicateIndex { .. } => "DuplicateIndex",
            Error::PivotBreakdown(_) => "PivotBreakdown",
            Error::SingularMixing(_) => "SingularMixing",
            Error::SingularMiddle(_) => "SingularMiddle",
            Error::NotFullRank(_) => "NotFullRank",
            Error::ZeroMatrix => "ZeroMatrix",
            Error::InvalidPeriod(_) => "InvalidPeriod",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::ParseError { .. } => "ParseError",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::Io(_) => "Io",
        }
    }

    /// True for breakdowns of a numerical nature (as opposed to bad input),
    /// used by the CLI to pick its exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularTriangular { .. }
                | Error::RankDeficientAnchor(_)
                | Error::PivotBreakdown(_)
                | Error::SingularMixing(_)
                | Error::SingularMiddle(_)
                | Error::NotFullRank(_)
                | Error::InconsistentSystem(_)
        )
    }
}
