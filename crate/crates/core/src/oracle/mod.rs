//! Brute-force simulation on the full `2^n`-dimensional Hilbert space.
//!
//! Everything here is written directly from the definitions (explicit Kraus
//! maps, explicit projectors, explicit partial traces) and serves as ground
//! truth for the closed-form routines elsewhere in the crate.
//!
//! Qubit `q` is bit `n - 1 - q` of a basis index, so index order matches the
//! Kronecker product `op_0 (x) op_1 (x) ...`. In micro-macro embeddings the
//! micro qubit is qubit 0.

mod channel;
mod density;
mod gates;
mod sld;
mod vector;

pub use channel::{apply_local_channel, LocalChannel};
pub use density::FullDensityMatrix;
pub use gates::{hadamard, pauli, rotation, Gate};
pub use sld::{pure_state_qfi, sld_quantum_fisher, SldRoute};
pub use vector::{
    collective_operator, embed_dicke, embed_micro_macro, embed_symmetric, single_site_operator,
    FullStateVector,
};

use crate::error::{Error, Result};

/// Largest register held as a dense state vector.
pub const MAX_STATE_QUBITS: usize = 12;
/// Largest register held as a dense density matrix.
pub const MAX_DENSITY_QUBITS: usize = 10;

pub(crate) fn check_state_capacity(n: usize) -> Result<()> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            limit: MAX_STATE_QUBITS,
            hint: "use the Dicke-basis routines for larger registers",
        });
    }
    Ok(())
}

pub(crate) fn check_density_capacity(n: usize) -> Result<()> {
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            limit: MAX_DENSITY_QUBITS,
            hint: "use the closed-form probability and Fisher routines for larger registers",
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}
