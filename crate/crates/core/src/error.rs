use thiserror::Error;

/// Errors shared across the whole workspace.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tau {0} is out of the supported range 1..={max}", max = crate::MAX_TAU)]
    TauOutOfRange(u32),

    #[error("elements belong to different bases")]
    BasisMismatch,

    #[error("sign vector has length {got}, expected {expected}")]
    SignVectorLength { expected: usize, got: usize },

    #[error("enumeration needs {required} points but the cap is {cap}")]
    Capacity { required: u128, cap: u64 },

    #[error("precision budget of {bits} bits exhausted before the enclosure converged")]
    PrecisionBudget { bits: u32 },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("{0}")]
    Range(String),

    #[error("cannot parse {0:?}: {1}")]
    Parse(String, String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no ({t},{eps},{h})-pair found in the given schedule; best margin {best_margin}")]
    PairNotFound {
        t: u32,
        eps: String,
        h: u32,
        best_margin: String,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
