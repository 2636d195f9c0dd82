//! Quantum Fisher information from the spectrum of the noisy probe.
//!
//! The work is done in the `x` product basis, where the generator
//! `sum_q sigma_x^(q)` is diagonal (`N - 2|s|`), bit-flip noise only damps
//! coherences (`rho_ss' -> q^{|s xor s'|} rho_ss'`, `q = e^{-gamma t}`) and the
//! state is real. With `rho = sum_i p_i |i><i|` and `G = (t/2) H`,
//! `F = sum_{ij} 2 (p_i - p_j)^2 / (p_i + p_j) |<i|G|j>|^2`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{EstimationScenario, NoiseKind};
use crate::error::{domain, Result};
use crate::linalg::hermitian_eigen;
use crate::oracle::{apply_local_channel, embed_dicke, rotation, FullDensityMatrix, LocalChannel, MAX_DENSITY_QUBITS};
use crate::symcore::{hadamard_overlap, Axis, Basis, DickeBasisLabel};
use crate::Error;

const PAIR_CUTOFF: f64 = 1e-12;

/// `F = sum 2 (p_i - p_j)^2/(p_i + p_j) |G_ij|^2` for a Hermitian `rho` and generator.
pub fn spectral_qfi(rho: &DMatrix<Complex64>, generator: &DMatrix<Complex64>) -> Result<f64> {
    if rho.shape() != generator.shape() || rho.nrows() != rho.ncols() {
        return domain("state and generator must be square matrices of equal size");
    }
    let (p, v) = hermitian_eigen(rho);
    let g = v.adjoint() * generator * &v;
    let d = p.len();
    let mut f = 0.0;
    for i in 0..d {
        for j in 0..d {
            let (pi, pj) = (p[i].max(0.0), p[j].max(0.0));
            if pi + pj < PAIR_CUTOFF {
                continue;
            }
            f += 2.0 * (pi - pj).powi(2) / (pi + pj) * g[(i, j)].norm_sqr();
        }
    }
    Ok(f)
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            limit: MAX_DENSITY_QUBITS,
            hint: "the quantum Fisher information is computed on the full register",
        });
    }
    Ok(())
}

/// `rho(t)` at `omega = 0` in the `x` product basis (real symmetric).
fn x_basis_state(scenario: &EstimationScenario, t: f64) -> Result<DMatrix<f64>> {
    let n = scenario.n_qubits;
    check_capacity(n)?;
    let d = 1usize << n;
    let k0 = (n - 1) / 2;
    let amp_by_weight: Vec<f64> = (0..=n)
        .map(|j| {
            let c = (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            hadamard_overlap(n, j, k0) / c.sqrt()
        })
        .collect();
    let amp: Vec<f64> = (0..d).map(|s| amp_by_weight[s.count_ones() as usize]).collect();
    let q = scenario.survival(t);
    match scenario.noise {
        NoiseKind::BitFlip => {
            let powers: Vec<f64> = (0..=n).map(|h| q.powi(h as i32)).collect();
            Ok(DMatrix::from_fn(d, d, |a, b| amp[a] * amp[b] * powers[(a ^ b).count_ones() as usize]))
        }
        NoiseKind::White => {
            let mut rho = DMatrix::from_fn(d, d, |a, b| amp[a] * amp[b]);
            let w_i = (1.0 + 3.0 * q) / 4.0;
            let w = (1.0 - q) / 4.0;
            for qb in 0..n {
                let mask = 1usize << (n - 1 - qb);
                let prev = rho.clone();
                for a in 0..d {
                    for b in 0..d {
                        // X is diagonal in this basis; Y and Z flip the bit
                        let sign = if (a ^ b) & mask != 0 { -1.0 } else { 1.0 };
                        rho[(a, b)] = (w_i + w * sign) * prev[(a, b)] + (w + w * sign) * prev[(a ^ mask, b ^ mask)];
                    }
                }
            }
            Ok(rho)
        }
    }
}

/// Quantum Fisher information of `rho(t)` for the frequency `omega`.
pub fn quantum_fisher_information(scenario: &EstimationScenario, t: f64) -> Result<f64> {
    scenario.validate()?;
    scenario.check_time(t)?;
    let n = scenario.n_qubits;
    let rho = x_basis_state(scenario, t)?;
    let eig = SymmetricEigen::new(rho);
    let p = &eig.eigenvalues;
    let v = &eig.eigenvectors;
    let h: Vec<f64> = (0..v.nrows()).map(|s| (n as f64 - 2.0 * s.count_ones() as f64) * t / 2.0).collect();
    let hv = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| h[r] * v[(r, c)]);
    let g = v.transpose() * hv;
    let d = p.len();
    let mut f = 0.0;
    for i in 0..d {
        let pi = p[i].max(0.0);
        for j in 0..d {
            let pj = p[j].max(0.0);
            if pi + pj < PAIR_CUTOFF {
                continue;
            }
            f += 2.0 * (pi - pj).powi(2) / (pi + pj) * g[(i, j)].powi(2);
        }
    }
    Ok(f)
}

/// Largest entry of `[rho(t), rho(2t)]` at `omega = 0`; zero exactly when the
/// two states share an eigenbasis.
pub fn eigenbasis_commutator(scenario: &EstimationScenario, t: f64) -> Result<f64> {
    scenario.validate()?;
    scenario.check_time(t)?;
    let a = x_basis_state(scenario, t)?;
    let b = x_basis_state(scenario, 2.0 * t)?;
    Ok((&a * &b - &b * &a).amax())
}

/// `rho(t)` on the full register in the computational basis, built from
/// explicit Kraus maps followed by the precession.
pub fn evolved_state(scenario: &EstimationScenario, t: f64) -> Result<FullDensityMatrix> {
    scenario.validate()?;
    scenario.check_time(t)?;
    let n = scenario.n_qubits;
    let psi = embed_dicke(DickeBasisLabel::new(n, (n - 1) / 2, Basis::Z)?)?;
    let rho = FullDensityMatrix::from_pure(&psi)?;
    let channel = match scenario.noise {
        NoiseKind::BitFlip => LocalChannel::BitFlipX(scenario.flip_parameter(t)),
        NoiseKind::White => LocalChannel::White(scenario.survival(t)),
    };
    let noisy = apply_local_channel(&rho, channel)?;
    Ok(noisy.rotate_all(&rotation(Axis::X, scenario.omega * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::Measurement;
    use crate::oracle::{collective_operator, sld_quantum_fisher};

    fn scenario(n: usize, gamma: f64, noise: NoiseKind) -> EstimationScenario {
        EstimationScenario::new(n, 1.0, gamma, noise, Measurement::OptimalGlobal).unwrap()
    }

    #[test]
    fn noiseless_qfi_is_four_variances() {
        for n in [3usize, 5, 7] {
            let s = scenario(n, 1e-300, NoiseKind::BitFlip);
            let t = 0.8;
            let nf = n as f64;
            let want = t * t * (nf * nf + 2.0 * nf - 1.0) / 2.0;
            let got = quantum_fisher_information(&s, t).unwrap();
            assert!((got - want).abs() < 1e-9 * want, "N={n}: {got} vs {want}");
        }
    }

    #[test]
    fn matches_sld_route() {
        for noise in [NoiseKind::BitFlip, NoiseKind::White] {
            let s = scenario(5, 0.5, noise);
            let t = 0.4;
            let rho = evolved_state(&s, t).unwrap();
            let h = collective_operator(5, &[0, 1, 2, 3, 4], Axis::X).unwrap() * Complex64::new(t / 2.0, 0.0);
            let (sld, _) = sld_quantum_fisher(&rho, &h).unwrap();
            let spec = quantum_fisher_information(&s, t).unwrap();
            assert!((sld - spec).abs() < 1e-8 * spec, "{noise:?}: {sld} vs {spec}");
            let dense = spectral_qfi(&rho.matrix, &h).unwrap();
            assert!((dense - spec).abs() < 1e-8 * spec);
        }
    }

    #[test]
    fn evolved_state_is_physical() {
        let s = scenario(5, 0.5, NoiseKind::BitFlip);
        let rho = evolved_state(&s, 0.3).unwrap();
        assert!(rho.is_valid(1e-10));
        assert!(rho.permutation_defect() < 1e-12);
        let pure = evolved_state(&s, 0.0).unwrap();
        assert!((pure.matrix.clone() * &pure.matrix - &pure.matrix).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn noise_never_helps() {
        for n in [3usize, 5] {
            for t in [0.2, 1.0, 3.0] {
                let pure = quantum_fisher_information(&scenario(n, 1e-300, NoiseKind::BitFlip), t).unwrap();
                for noise in [NoiseKind::BitFlip, NoiseKind::White] {
                    let noisy = quantum_fisher_information(&scenario(n, 0.5, noise), t).unwrap();
                    assert!(noisy <= pure + 1e-9);
                }
            }
        }
    }

    #[test]
    fn eigenbasis_is_not_time_independent() {
        // the spectrum changes and so do the eigenvectors: rho(t) and rho(2t)
        // do not commute, so the decomposition is redone at every t
        let s = scenario(5, 0.5, NoiseKind::BitFlip);
        assert!(eigenbasis_commutator(&s, 0.5).unwrap() > 1e-4);
        assert!(eigenbasis_commutator(&s, 0.0).unwrap() < 1e-14);
    }

    #[test]
    fn capacity_is_enforced() {
        let s = scenario(11, 0.5, NoiseKind::BitFlip);
        assert!(matches!(quantum_fisher_information(&s, 1.0), Err(Error::Capacity { .. })));
    }
}
