use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gates::{identity, pauli, scale, Gate};
use super::FullDensityMatrix;
use crate::error::{domain, Result};
use crate::symcore::Axis;

/// Identical single-qubit noise applied to every qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LocalChannel {
    /// `u rho + (1 - u) Z rho Z`
    PhaseZ(f64),
    /// `u rho + (1 - u) X rho X`
    BitFlipX(f64),
    /// `p rho + (1 - p) I/2`
    White(f64),
}

impl LocalChannel {
    pub fn kraus(&self) -> Result<Vec<Gate>> {
        match *self {
            LocalChannel::PhaseZ(u) | LocalChannel::BitFlipX(u) => {
                if !(0.0..=1.0).contains(&u) {
                    return domain(format!("flip channel parameter u = {u} outside [0, 1]"));
                }
                let axis = if matches!(self, LocalChannel::PhaseZ(_)) {
                    Axis::Z
                } else {
                    Axis::X
                };
                Ok(vec![scale(&identity(), u.sqrt()), scale(&pauli(axis), (1.0 - u).sqrt())])
            }
            LocalChannel::White(p) => {
                if !(0.0..=1.0).contains(&p) {
                    return domain(format!("white-noise parameter p = {p} outside [0, 1]"));
                }
                let w = ((1.0 - p) / 4.0).sqrt();
                Ok(vec![
                    scale(&identity(), ((1.0 + 3.0 * p) / 4.0).sqrt()),
                    scale(&pauli(Axis::X), w),
                    scale(&pauli(Axis::Y), w),
                    scale(&pauli(Axis::Z), w),
                ])
            }
        }
    }
}

/// Applies the channel to each qubit in turn, qubit 0 first.
pub fn apply_local_channel(rho: &FullDensityMatrix, channel: LocalChannel) -> Result<FullDensityMatrix> {
    let kraus = channel.kraus()?;
    let mut current = rho.clone();
    for q in 0..rho.n_qubits {
        let mut acc = DMatrix::<Complex64>::zeros(rho.dim(), rho.dim());
        for k in &kraus {
            acc += current.conjugate_gate(q, k);
        }
        current.matrix = acc;
    }
    Ok(current)
}
