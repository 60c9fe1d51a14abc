use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unit index {index} out of range for population of {n_units}")]
    UnitOutOfRange { index: usize, n_units: usize },

    #[error("assignment index {index} out of range for {n_assignments} assignments")]
    AssignmentOutOfRange { index: usize, n_assignments: usize },

    #[error("assignment has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid exposure mapping: {0}")]
    InvalidExposure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support holds {available} assignments, cannot draw a subsample of {requested}")]
    SupportTooSmall { requested: usize, available: usize },

    #[error("focal exposure set is empty")]
    EmptyFocalSet,

    #[error("assignment {index} duplicates assignment {first}")]
    DuplicateAssignment { index: usize, first: usize },

    #[error("exposure sets in the family overlap on label {0}")]
    OverlappingFamily(String),

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("exact search limited to graphs with a side of at most {limit} nodes (got {n_units} x {n_assignments})")]
    SearchTooLarge { n_units: usize, n_assignments: usize, limit: usize },

    #[error("hypothesis is untestable: {0}")]
    Untestable(String),

    #[error("exposure group {label} is empty under assignment {assignment}")]
    EmptyGroup { label: String, assignment: usize },

    #[error("randomization distribution has zero total mass")]
    ZeroMass,

    #[error("design matrix is rank deficient (rank {rank} < {columns} columns)")]
    RankDeficient { rank: usize, columns: usize },

    #[error("all unit degrees are zero")]
    ZeroDegrees,

    #[error("empty grid")]
    EmptyGrid,

    #[error("malformed input: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Conditions where the realized data cannot support a test, as opposed
    /// to caller mistakes.
    pub fn is_untestable(&self) -> bool {
        matches!(self, Error::Untestable(_) | Error::EmptyGroup { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
