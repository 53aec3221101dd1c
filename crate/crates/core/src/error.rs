use alloc::string::String;

use thiserror::Error;

/// Errors reported by the algebra, the information measures, the bounds and
/// the code verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid character {0:?} in word")]
    InvalidSymbol(char),

    #[error("{name} = {value} is not a probability in [0, 1]")]
    Probability { name: &'static str, value: f64 },

    #[error("thresholds eta1 = {eta1}, eta2 = {eta2} invalid for {m} defectives (need 0 <= eta1 <= eta2 <= m - 1)")]
    Thresholds { eta1: usize, eta2: usize, m: usize },

    #[error("subject {index} out of range for {subjects} subjects")]
    SubjectIndex { index: usize, subjects: usize },

    #[error("subject {0} listed twice")]
    DuplicateSubject(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exhaustive search too large: {0}")]
    Guard(String),

    /// Decoding failure: `best` candidate sets share the highest likelihood
    /// (zero when no candidate explains the observation at all).
    #[error("ambiguous observation: {best} candidate sets are equally likely")]
    Ambiguous { best: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Probability { name, value })
    }
}
