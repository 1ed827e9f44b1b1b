use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or problem parameter failed validation.
    #[error("{field} must be > 0")]
    NonPositive { field: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("prehistory at t = 0 does not match the initial data (X-norm mismatch {mismatch:.3e})")]
    Compatibility { mismatch: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("quadrature did not reach tolerance (achieved estimate {estimate:.3e})")]
    Quadrature { estimate: f64 },

    #[error("config error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        message: String,
        line: usize,
        column: usize,
    },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration/validation of
    /// inputs, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Quadrature { .. } => 3,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
