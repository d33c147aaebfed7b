use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("digit {digit} is outside the input alphabet of size {radix}")]
    MalformedInput { digit: u32, radix: u32 },

    #[error("malformed automaton: {0}")]
    MalformedAutomaton(String),

    #[error("automaton has no states")]
    EmptyAutomaton,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("cascade for m = {modulus} exceeds the limit of {limit} reachable states")]
    StateLimit { modulus: u32, limit: usize },

    #[error("polynomial data: {0}")]
    PolynomialData(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}
