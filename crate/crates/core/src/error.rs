use thiserror::Error;

use crate::numerics::ComplexMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |A - A†| = {deviation:.3e})")]
    Hermiticity { deviation: f64 },

    #[error("not a physical state: {0}")]
    InvalidState(String),

    #[error("invalid machine parameters: {0}")]
    InvalidMachine(String),

    #[error("no state-independent non-orthogonal machine exists for dimension {dim} (requires dim <= 3)")]
    NoUniversalMachine { dim: usize },

    #[error("machine cannot be realized: {0}")]
    InfeasibleMachine(String),

    #[error("closed-form {variant} output `{output}` is not a density matrix: {reason}")]
    ClosedFormInconsistency {
        variant: String,
        output: &'static str,
        reason: String,
        matrix: Box<ComplexMatrix>,
    },

    #[error("no printed closed form for {variant} with {pairing} pairing")]
    NoClosedForm { variant: String, pairing: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("record grids differ: {0}")]
    GridMismatch(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
}
