use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the family of states this toolkit models (e.g. even N for the cloner map).
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Dense full-space simulation requested beyond the configured qubit cap.
    #[error("capacity exceeded: {requested} qubits requested, limit is {limit} ({hint})")]
    Capacity {
        requested: usize,
        limit: usize,
        hint: &'static str,
    },

    /// An exact scalar type was asked for the square root of a non-square.
    #[error("square root of {0} is not representable in the exact scalar type")]
    InexactSqrt(String),

    /// Two numerical routes that must agree did not.
    #[error("numerical health check failed: {0}")]
    NumericalHealth(String),

    /// A structural identity that must hold by construction was violated.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Rejects even or zero qubit counts for the cloner family.
pub(crate) fn require_odd(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits.is_multiple_of(2) {
        return Err(Error::UnsupportedInput(format!(
            "N = {n_qubits}: the cloner map is only modelled for odd N"
        )));
    }
    Ok(())
}
