use alloc::string::String;

use crate::operators::Basis;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: Basis, right: Basis },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state carries no qubit/cavity subsystem metadata")]
    MissingSubsystems,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("trace drifted by {drift:e} at t = {time}; reduce the step size")]
    TraceDrift { time: f64, drift: f64 },

    #[error("state lost positivity at t = {time} (min eigenvalue {min_eigenvalue:e})")]
    PositivityLost { time: f64, min_eigenvalue: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
