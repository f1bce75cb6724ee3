use std::path::PathBuf;

/// Errors raised by the library and the simulation harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("user {user} has a zero channel vector")]
    DegenerateChannel { user: usize },

    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },

    #[error("representative channels are rank deficient (smallest/largest singular value = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("{clusters} clusters exceed {antennas} transmit antennas")]
    TooManyClusters { clusters: usize, antennas: usize },

    #[error("inter-cluster coupling admits no finite power (denominator {denominator:e})")]
    InfeasibleSystem { denominator: f64 },

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("instance too large for the oracle: {0}")]
    SizeExceeded(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
