use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A memo table or search tree would grow past its configured cap.
    #[error("{what} budget exceeded (limit {limit})")]
    Budget { what: &'static str, limit: usize },

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("learner stepped past its horizon {horizon}")]
    HorizonExceeded { horizon: usize },

    #[error("setting mismatch: {0}")]
    SettingMismatch(String),

    #[error("expectation diverges: {0}")]
    Divergence(String),

    #[error("numerical tolerance not met: {0}")]
    Numerical(String),

    #[error("unknown learner or adversary spec: {0}")]
    UnknownSpec(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
