use thiserror::Error;

/// Failure modes shared across the library.
///
/// Everything here is deterministic: the same inputs and configuration
/// produce the same error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The evaluation spent its whole expansion budget without the control
    /// function ever barring the play. Typically the game is not
    /// well-founded (the control function grows faster than the play).
    #[error("expansion budget of {limit} exhausted")]
    BudgetExhausted { limit: u64 },

    /// A bit-length parameter exceeded the configured cap.
    #[error("bit length {n} exceeds the configured depth cap {cap}")]
    DepthCapExceeded { n: u64, cap: u64 },

    /// The shortest-barred-prefix search ran off the end of its candidate
    /// list without finding a barred prefix.
    #[error("no barred prefix found while building the interval approximation")]
    MuSearchFailed,

    /// A guaranteed-by-construction property failed to hold at runtime.
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(&'static str),

    /// A sequence assumed nondecreasing was observed to decrease.
    #[error("sequence decreases at index {index}")]
    MonotonicityViolation { index: u64 },

    /// Malformed or out-of-contract input (files, specs, domains).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of budgets or continuity assumptions, as opposed to
    /// malformed input. Command-line tools map these to a distinct exit code.
    pub fn is_resource_limit(&self) -> bool {
        !matches!(self, Error::InvalidInput(_))
    }
}
