//! Frequency estimation with the central Dicke state `|N, (N-1)/2>` under
//! local noise.
//!
//! Every qubit precesses as `exp(-i omega t sigma_x / 2)` while suffering
//! either bit-flip noise along `x` (`u = (1 + e^{-gamma t})/2`) or white noise
//! (`p = e^{-gamma t}`). Both channels commute with the precession. The
//! figure of merit is `delta omega = sqrt(t / (T F(t)))`, minimised over the
//! interrogation time `t`, compared with the product-state value
//! `sqrt(2 e gamma / (T N))`.

mod optimize;
mod probabilities;
mod qfi;

pub use optimize::{
    classical_fisher_information, cramer_rao_uncertainty, estimate, fisher_at,
    optimize_measurement_angle, optimize_measurement_angle_with, product_state_uncertainty,
    relative_improvement_curve, AngleOptimum, ClassicalFisher, FisherResult, TimeOptimum,
    ANGLE_GRID_STEP, TIME_GRID_POINTS,
};
pub use probabilities::{
    measurement_probabilities, measurement_probabilities_with_derivative,
    oracle_measurement_probabilities,
};
pub use qfi::{eigenbasis_commutator, evolved_state, quantum_fisher_information, spectral_qfi};

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_odd, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    /// `u rho + (1 - u) X rho X` on every qubit.
    BitFlip,
    /// `p rho + (1 - p) I/2` on every qubit.
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Measurement {
    /// Best possible measurement: the quantum Fisher information.
    OptimalGlobal,
    /// Collective `z` readout (number of excitations).
    CollectiveZ,
    /// Collective readout in a basis turned by `alpha` about `x`.
    RotatedCollective(f64),
    /// `RotatedCollective` with `alpha` optimised at every `t`.
    OptimizedLocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationScenario {
    pub n_qubits: usize,
    pub omega: f64,
    pub gamma: f64,
    pub noise: NoiseKind,
    pub total_time: f64,
    pub measurement: Measurement,
}

impl EstimationScenario {
    /// Validated scenario with `T = 1`.
    pub fn new(n_qubits: usize, omega: f64, gamma: f64, noise: NoiseKind, measurement: Measurement) -> Result<Self> {
        let s = Self {
            n_qubits,
            omega,
            gamma,
            noise,
            total_time: 1.0,
            measurement,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_measurement(mut self, measurement: Measurement) -> Result<Self> {
        self.measurement = measurement;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise(mut self, noise: NoiseKind) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_odd(self.n_qubits)?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return domain(format!("decoherence rate gamma = {} must be positive", self.gamma));
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return domain(format!("total time T = {} must be positive", self.total_time));
        }
        if !self.omega.is_finite() {
            return domain("omega must be finite");
        }
        if let Measurement::RotatedCollective(a) = self.measurement {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&a) {
                return domain(format!("measurement angle {a} outside [0, pi/2]"));
            }
        }
        Ok(())
    }

    /// `e^{-gamma t}`.
    pub fn survival(&self, t: f64) -> f64 {
        (-self.gamma * t).exp()
    }

    /// Per-qubit flip parameter `u = (1 + e^{-gamma t})/2`; for white noise
    /// this is the bit-flip channel with the same effect on local readouts.
    pub fn flip_parameter(&self, t: f64) -> f64 {
        0.5 * (1.0 + self.survival(t))
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return domain(format!("interrogation time t = {t} must be non-negative"));
        }
        Ok(())
    }
}
