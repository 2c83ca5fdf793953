use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("singular model: the discriminant vanishes")]
    SingularModel,
    #[error("malformed model change: {0}")]
    MalformedChange(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("orbit collision: {0}")]
    OrbitCollision(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Domain(_)
            | Error::Precondition(_)
            | Error::SingularModel
            | Error::MalformedChange(_)
            | Error::Input(_)
            | Error::OrbitCollision(_) => 3,
            Error::Resource(_) | Error::Numeric(_) => 4,
        }
    }
}
