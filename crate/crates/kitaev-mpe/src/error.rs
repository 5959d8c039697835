use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("chain length L={0} must be an even integer >= 4")]
    BadChainLength(usize),

    #[error("site distance l={l} out of range 1..={max}")]
    DistanceOutOfRange { l: usize, max: usize },

    #[error("unresolved winding: raw={raw}, nearest half-integer off by {snap_error} (grid too coarse or parameters on a phase boundary)")]
    UnresolvedWinding { raw: f64, snap_error: f64 },

    #[error("variance bound violated: f_Q={0} outside [0, L] (convention bug or degenerate ground state)")]
    VarianceBound(f64),

    #[error("chain length L={0} exceeds the Fock-space limit for this operation")]
    FockTooLarge(usize),

    #[error("scaling fit needs at least 4 distinct sizes, got {0}")]
    TooFewSizes(usize),

    #[error("scaling fit: f_Q - 1 = {0} is negative beyond tolerance")]
    NegativeExcess(f64),

    #[error("collapse: {0}")]
    Collapse(String),

    #[error("sweep: {0}")]
    Sweep(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
