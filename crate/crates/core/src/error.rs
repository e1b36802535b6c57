use std::path::PathBuf;

/// Errors raised anywhere in the discretization pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:.3e})"
    )]
    SolverFailure {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("refusing to emit an empty report")]
    EmptyData,

    #[error("malformed input at {location}: {message}")]
    Format { location: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
