use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("degenerate demand for county {county}, housing type {housing_type}: base-period implied demand is zero")]
    DegenerateDemand { county: String, housing_type: String },

    #[error("no rows survived: {0}")]
    EmptyResult(String),

    #[error("design matrix is rank deficient: column {index} ({name}) is collinear with earlier columns")]
    Collinear { index: usize, name: String },

    #[error("fixed-effect absorption did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("cluster-robust covariance needs at least 2 clusters, found {0}")]
    InsufficientClusters(usize),

    #[error("insufficient observations: {0}")]
    InsufficientData(String),

    #[error("oracle refuses instance: {0}")]
    OracleGuard(String),

    #[error("validation failed with {0} violation(s)")]
    ValidationFailed(usize),
}

/// Process exit status families used by the command-line surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Success = 0,
    Failure = 1,
    Io = 2,
    Numerical = 3,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_kind(&self) -> ExitKind {
        match self {
            Error::Io { .. } | Error::Csv { .. } | Error::Schema(_) | Error::Config(_) => {
                ExitKind::Io
            }
            Error::Collinear { .. } | Error::NotConverged { .. } => ExitKind::Numerical,
            _ => ExitKind::Failure,
        }
    }

    /// Short machine-readable tag for error records.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::Schema(_) => "schema",
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Invariant(_) => "invariant",
            Error::DegenerateDemand { .. } => "degenerate_demand",
            Error::EmptyResult(_) => "empty_result",
            Error::Collinear { .. } => "collinear",
            Error::NotConverged { .. } => "not_converged",
            Error::InsufficientClusters(_) => "insufficient_clusters",
            Error::InsufficientData(_) => "insufficient_data",
            Error::OracleGuard(_) => "oracle_guard",
            Error::ValidationFailed(_) => "validation_failed",
        }
    }
}
