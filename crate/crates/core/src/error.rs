use thiserror::Error;

/// Errors produced by the repeater model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown code `{name}`; valid names: {valid}")]
    UnknownCode { name: String, valid: String },

    #[error("code `{0}` has no decoder (registered for analytic use only)")]
    UnsupportedDecoder(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{0}")]
    Domain(String),

    #[error("code `{name}` violates a construction invariant: {what}")]
    InvalidCode { name: String, what: String },

    #[error("target failure probability {target:e} unreachable: {why}")]
    Unreachable { target: f64, why: String },

    #[error("instance too large to enumerate: {bits} error bits (limit {limit})")]
    TooLarge { bits: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Checks that `p` is a probability, naming it in the error.
pub(crate) fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in [0, 1], got {p}")))
    }
}
