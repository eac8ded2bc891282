use thiserror::Error;

/// Failure modes of the simulator.
///
/// [`Error::exit_code`] maps each variant to the CLI's process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("channel model error: {0}")]
    Model(String),
    #[error("tap condition violated: {0}")]
    Tap(String),
    #[error("memory length diverged: {0}")]
    Divergence(String),
    #[error("estimation did not converge: {0}")]
    Estimation(String),
    #[error("singular channel: {0}")]
    SingularChannel(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 2 for configuration-class errors, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::Model(_)
            | Error::Tap(_)
            | Error::Precondition(_)
            | Error::Contract(_)
            | Error::Config(_) => 2,
            Error::Divergence(_)
            | Error::Estimation(_)
            | Error::SingularChannel(_)
            | Error::Numerics(_) => 3,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
