use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its invariant. `key` is the dotted
    /// config path (for example `gain.psi_b`).
    #[error("invalid config value `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// The config document could not be parsed.
    #[error("failed to parse config: {0}")]
    Parse(String),

    #[error("time {t} s is outside the pass [0, {duration}] s")]
    OutOfPass { t: f64, duration: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("SNR vector is not sorted in nonincreasing order (index {index})")]
    Order { index: usize },

    #[error("input of length {len} exceeds the enumeration limit {max}")]
    Size { len: usize, max: usize },
}

impl Error {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
