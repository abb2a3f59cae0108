use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    Parse(String),

    #[error("alpha has {alpha} entries but beta has {beta}")]
    LengthMismatch { alpha: usize, beta: usize },

    #[error("parameter lists must be non-empty")]
    Empty,

    #[error(
        "reducible parameters: alpha[{alpha_index}] = beta[{beta_index}] = {value}; \
         irreducibility requires α_i ≠ β_j for all i, j"
    )]
    Reducible {
        alpha_index: usize,
        beta_index: usize,
        value: String,
    },

    #[error("index {index} out of range for a tuple of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("Hodge data at residue {residue}, ell = {ell} is not determined")]
    UnknownData { residue: String, ell: u32 },

    #[error("no valid peel index: {0}")]
    NoValidPeel(String),

    #[error("engine consulted an undetermined slot: {0}")]
    InternalUnknownConsulted(String),

    #[error("inconsistent input data: {0}")]
    Inconsistent(String),

    #[error("convolution parameter must lie in (0, 1), got {0}")]
    InvalidGamma(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
