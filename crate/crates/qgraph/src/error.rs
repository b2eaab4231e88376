use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] qgraph_core::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("schema version {found:?} is not supported (expected {expected:?})")]
    SchemaVersion { found: String, expected: &'static str },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{count} bound violation(s): {summary}")]
    BoundViolation { count: usize, summary: String },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 2 parameter, 3 numerical, 4 bound violation.
    pub fn exit_code(&self) -> i32 {
        use qgraph_core::Error as C;
        match self {
            Error::Context { source, .. } => source.exit_code(),
            Error::Core(c) => match c {
                C::Parameter(_) | C::NotUnitary { .. } => 2,
                C::GenerationFailed { .. }
                | C::Numerical { .. }
                | C::PathCapExceeded { .. }
                | C::Quadrature { .. }
                | C::PoleProximity { .. }
                | C::InsufficientRoots { .. } => 3,
            },
            Error::Config(_) | Error::Format { .. } | Error::SchemaVersion { .. } | Error::Io { .. } => 2,
            Error::BoundViolation { .. } => 4,
        }
    }
}
