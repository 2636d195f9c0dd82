//! Closed-form routines against the full-register simulator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use clonemacro::distinguish::{noisy_probabilities, pair_coarsened_delta, povm_probabilities, sharp_probabilities};
use clonemacro::macromeasures::{covariance_matrix, subgroup_success_probability, SubgroupMode};
use clonemacro::metrology::{
    evolved_state, measurement_probabilities, oracle_measurement_probabilities, quantum_fisher_information,
    EstimationScenario, Measurement, NoiseKind,
};
use clonemacro::oracle::{
    apply_local_channel, collective_operator, embed_micro_macro, embed_symmetric, hadamard, pauli,
    single_site_operator, sld_quantum_fisher, FullDensityMatrix, LocalChannel,
};
use clonemacro::symcore::{cloner_state, micro_macro_state, Axis, Sign};
use clonemacro::{linalg, Result};

/// Seed for every randomised check, so reports are reproducible.
pub const SEED: u64 = 0x5eed_c10e;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub n_qubits: usize,
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "outcome counts differ");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn cloner_density(n: usize, sign: Sign) -> Result<FullDensityMatrix> {
    FullDensityMatrix::from_pure(&embed_symmetric(&cloner_state::<f64>(n, sign)?)?)
}

/// `x`-weight statistics of both cloner branches after an optional channel.
pub fn oracle_x_statistics(n: usize, channel: Option<LocalChannel>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::with_capacity(2);
    for sign in [Sign::Plus, Sign::Minus] {
        let mut rho = cloner_density(n, sign)?;
        if let Some(ch) = channel {
            rho = apply_local_channel(&rho, ch)?;
        }
        out.push(rho.rotated_weight_probabilities(&hadamard()));
    }
    let minus = out.pop().unwrap();
    Ok((out.pop().unwrap(), minus))
}

/// Projectors onto fixed `x`-weight subspaces as full matrices.
fn x_weight_projectors(n: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let d = 1usize << n;
    (0..=n)
        .map(|k| {
            let diag = DMatrix::from_fn(d, d, |a, b| {
                if a == b && a.count_ones() as usize == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            Ok(FullDensityMatrix::new(n, diag)?.rotate_all(&hadamard()).matrix)
        })
        .collect()
}

/// Gaussian POVM elements `E_i = sum_k w_k exp(-(i-k)^2/(4 sigma^2)) P_k` with
/// `w_k = n_k^{-1/2}` (complete) or the uncorrected `w_k = n_k^{1/2}`.
pub fn povm_elements(n: usize, sigma: f64, normalised: bool) -> Result<Vec<DMatrix<Complex64>>> {
    let proj = x_weight_projectors(n)?;
    let norms: Vec<f64> = (0..=n)
        .map(|k| (0..=n).map(|i| (-((i as f64 - k as f64).powi(2)) / (2.0 * sigma * sigma)).exp()).sum())
        .collect();
    Ok((0..=n)
        .map(|i| {
            proj.iter().enumerate().fold(DMatrix::zeros(1 << n, 1 << n), |acc, (k, p)| {
                let w = if normalised { norms[k].powf(-0.5) } else { norms[k].sqrt() };
                acc + p * Complex64::new(w * (-((i as f64 - k as f64).powi(2)) / (4.0 * sigma * sigma)).exp(), 0.0)
            })
        })
        .collect())
}

/// Largest entry of `sum_i E_i^2 - 1`.
pub fn povm_completeness_defect(elements: &[DMatrix<Complex64>]) -> f64 {
    let d = elements[0].nrows();
    let sum = elements.iter().fold(DMatrix::<Complex64>::zeros(d, d), |acc, e| acc + e * e);
    (sum - DMatrix::<Complex64>::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn check_sharp(n: usize) -> Result<CheckReport> {
    let model = sharp_probabilities::<f64>(n)?;
    let (p, m) = oracle_x_statistics(n, None)?;
    Ok(CheckReport {
        check: "sharp-x",
        n_qubits: n,
        points: 1,
        max_deviation: max_abs_diff(&model.probs_plus, &p).max(max_abs_diff(&model.probs_minus, &m)),
        tolerance: 1e-10,
    })
}

pub fn check_pair(n: usize) -> Result<CheckReport> {
    let model: f64 = pair_coarsened_delta(n)?;
    let (p, m) = oracle_x_statistics(n, None)?;
    let merged: f64 = p.chunks(2).zip(m.chunks(2)).map(|(a, b)| (a.iter().sum::<f64>() - b.iter().sum::<f64>()).abs()).sum();
    Ok(CheckReport {
        check: "pair-coarsened",
        n_qubits: n,
        points: 1,
        max_deviation: (model - merged).abs(),
        tolerance: 1e-10,
    })
}

pub fn check_povm(n: usize, points: usize, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let rho = [cloner_density(n, Sign::Plus)?, cloner_density(n, Sign::Minus)?];
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let sigma = rng.gen_range(0.1..2.0 * (n as f64).sqrt());
        let model = povm_probabilities(n, sigma)?;
        let elements = povm_elements(n, sigma, true)?;
        worst = worst.max(povm_completeness_defect(&elements));
        for (r, probs) in rho.iter().zip([&model.probs_plus, &model.probs_minus]) {
            let oracle: Vec<f64> = elements.iter().map(|e| r.expectation(&(e * e)).re).collect();
            worst = worst.max(max_abs_diff(probs, &oracle));
        }
    }
    Ok(CheckReport {
        check: "gaussian-povm",
        n_qubits: n,
        points,
        max_deviation: worst,
        tolerance: 1e-10,
    })
}

pub fn check_noisy(n: usize, points: usize, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let u = rng.gen_range(0.5..=1.0);
        let model = noisy_probabilities(n, u)?;
        let (p, m) = oracle_x_statistics(n, Some(LocalChannel::PhaseZ(u)))?;
        worst = worst.max(max_abs_diff(&model.probs_plus, &p)).max(max_abs_diff(&model.probs_minus, &m));
    }
    Ok(CheckReport {
        check: "phase-noise",
        n_qubits: n,
        points,
        max_deviation: worst,
        tolerance: 1e-10,
    })
}

fn random_scenario(n: usize, rng: &mut ChaCha8Rng) -> Result<(EstimationScenario, f64, f64)> {
    let noise = if rng.gen_bool(0.5) { NoiseKind::BitFlip } else { NoiseKind::White };
    let s = EstimationScenario::new(
        n,
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.05..1.0),
        noise,
        Measurement::CollectiveZ,
    )?;
    Ok((s, rng.gen_range(0.01..3.0), rng.gen_range(0.0..std::f64::consts::FRAC_PI_2)))
}

pub fn check_rotated_readout(n: usize, points: usize, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let (s, t, alpha) = random_scenario(n, rng)?;
        let model = measurement_probabilities(&s, t, alpha)?;
        let oracle = oracle_measurement_probabilities(&s, t, alpha)?;
        worst = worst.max(max_abs_diff(&model, &oracle));
    }
    Ok(CheckReport {
        check: "rotated-readout",
        n_qubits: n,
        points,
        max_deviation: worst,
        tolerance: 1e-10,
    })
}

/// Relative gap between the spectral and the SLD Fisher information.
pub fn check_qfi_routes(n: usize, points: usize, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let all: Vec<usize> = (0..n).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let (s, t, _) = random_scenario(n, rng)?;
        let spectral = quantum_fisher_information(&s, t)?;
        let h = collective_operator(n, &all, Axis::X)? * Complex64::new(t / 2.0, 0.0);
        let (sld, _) = sld_quantum_fisher(&evolved_state(&s, t)?, &h)?;
        worst = worst.max((spectral - sld).abs() / spectral.abs().max(1e-300));
    }
    Ok(CheckReport {
        check: "qfi-dual-route",
        n_qubits: n,
        points,
        max_deviation: worst,
        tolerance: 1e-8,
    })
}

/// Exact subgroup probabilities against trace distances of explicit partial traces.
pub fn check_subgroup(n: usize) -> Result<CheckReport> {
    let rp = cloner_density(n, Sign::Plus)?;
    let rm = cloner_density(n, Sign::Minus)?;
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let kept: Vec<usize> = (0..k).collect();
        let diff = rp.partial_trace(&kept)?.matrix - rm.partial_trace(&kept)?.matrix;
        let oracle = 0.5 + 0.25 * linalg::hermitian_trace_norm(&diff);
        let model = subgroup_success_probability(n, k, SubgroupMode::Exact)?.probability;
        worst = worst.max((oracle - model).abs());
    }
    Ok(CheckReport {
        check: "subgroup-trace-distance",
        n_qubits: n,
        points: n,
        max_deviation: worst,
        tolerance: 1e-10,
    })
}

/// Covariance matrix of the micro-macro state against explicit operators.
pub fn check_covariance(n: usize) -> Result<CheckReport> {
    let state = micro_macro_state::<f64>(n)?;
    let model = covariance_matrix(&state)?.to_f64();
    let psi = embed_micro_macro(&state)?;
    let total = n + 1;
    let macro_qubits: Vec<usize> = (1..total).collect();
    let mut ops = Vec::with_capacity(6);
    for axis in Axis::ALL {
        ops.push(single_site_operator(total, 0, &pauli(axis))?);
    }
    for axis in Axis::ALL {
        ops.push(collective_operator(total, &macro_qubits, axis)?);
    }
    let mean: Vec<f64> = ops.iter().map(|o| psi.expectation(o).re).collect();
    let mut worst: f64 = 0.0;
    for r in 0..6 {
        for c in 0..6 {
            let v = psi.expectation(&(&ops[r] * &ops[c])).re - mean[r] * mean[c];
            worst = worst.max((v - model[(r, c)]).abs());
        }
    }
    Ok(CheckReport {
        check: "covariance",
        n_qubits: n,
        points: 36,
        max_deviation: worst,
        tolerance: 1e-12,
    })
}

/// All checks for one register size.
pub fn run_all(n: usize, points: usize) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ n as u64);
    Ok(vec![
        check_sharp(n)?,
        check_pair(n)?,
        check_povm(n, points, &mut rng)?,
        check_noisy(n, points, &mut rng)?,
        check_rotated_readout(n, points, &mut rng)?,
        check_qfi_routes(n, points, &mut rng)?,
        check_subgroup(n)?,
        check_covariance(n)?,
    ])
}

/// Deliberately corrupted formulas; each must be caught by its check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Canary {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Canary {
    pub fn detected(&self) -> bool {
        self.deviation > self.tolerance
    }
}

pub fn canaries(n: usize) -> Result<Vec<Canary>> {
    // POVM weights sqrt(n_k) instead of 1/sqrt(n_k): completeness breaks
    let povm = povm_completeness_defect(&povm_elements(n, 1.0, false)?);
    // branch labels swapped: even and odd supports trade places
    let model = sharp_probabilities::<f64>(n)?;
    let (p, _) = oracle_x_statistics(n, None)?;
    let parity = max_abs_diff(&model.probs_minus, &p);
    Ok(vec![
        Canary {
            name: "povm-unnormalised",
            deviation: povm,
            tolerance: 1e-10,
        },
        Canary {
            name: "parity-swapped",
            deviation: parity,
            tolerance: 1e-10,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes_at_three_qubits() {
        for r in run_all(3, 3).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn canaries_are_caught() {
        for c in canaries(3).unwrap() {
            assert!(c.detected(), "{c:?}");
        }
    }
}
