//! Collective readout statistics of the noisy, precessed Dicke probe.
//!
//! The register is split into the `i` qubits found in `|1>` and the `N - i`
//! found in `|0>`. On a block of `m` qubits, with
//! `nu_{jl} = <m, j|H^{(x)m}|m, l>` and `phi = omega t - 2 alpha`,
//!
//! `Gamma^{(m)}_{jj'} = sum_{l l'} s^{l + l'} nu_{jl} nu_{j'l'} e^{-i phi (l - l')} W_{ll'}`,
//! `W_{ll'} = sum_r nu_{rl} nu_{rl'} u^{m - r} (1 - u)^r`,
//!
//! i.e. `Gamma = A W A^dagger` with `A_{jl} = s^l nu_{jl} e^{-i phi l}`, and
//! `s_i = Re sum_{j, j'} mu_j mu_j' Gamma^{(i), -}_{jj'} Gamma^{(N-i), +}_{k0-j, k0-j'}`
//! with `mu_j^2 = C(N, i) C(i, j) C(N - i, k0 - j) / C(N, k0)`.
//! The `omega`-derivative follows from `dA/d omega = -i t l A`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{evolved_state, EstimationScenario};
use crate::combinatorics::log_binomial;
use crate::oracle::rotation;
use crate::symcore::{hadamard_overlap_matrix, Axis};
use crate::Result;

struct Block {
    gamma: DMatrix<Complex64>,
    d_gamma: DMatrix<Complex64>,
}

fn block(m: usize, sign: f64, u: f64, phi: f64, t: f64) -> Block {
    let nu = hadamard_overlap_matrix(m);
    let weights: Vec<f64> = (0..=m).map(|r| u.powi((m - r) as i32) * (1.0 - u).powi(r as i32)).collect();
    let w = DMatrix::from_fn(m + 1, m + 1, |l, lp| {
        (0..=m).map(|r| nu[(r, l)] * nu[(r, lp)] * weights[r]).sum::<f64>()
    })
    .map(|x| Complex64::new(x, 0.0));
    let a = DMatrix::from_fn(m + 1, m + 1, |j, l| {
        let s = if l % 2 == 1 { sign } else { 1.0 };
        Complex64::from_polar(s * nu[(j, l)], -phi * l as f64)
    });
    let da = DMatrix::from_fn(m + 1, m + 1, |j, l| a[(j, l)] * Complex64::new(0.0, -t * l as f64));
    let aw = &a * &w;
    let gamma = &aw * a.adjoint();
    let d_gamma = &da * &w * a.adjoint() + &aw * da.adjoint();
    Block { gamma, d_gamma }
}

fn probabilities_impl(scenario: &EstimationScenario, t: f64, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    scenario.validate()?;
    scenario.check_time(t)?;
    let n = scenario.n_qubits;
    let k0 = (n - 1) / 2;
    let u = scenario.flip_parameter(t);
    let phi = scenario.omega * t - 2.0 * alpha;
    let minus: Vec<Block> = (0..=n).map(|m| block(m, -1.0, u, phi, t)).collect();
    let plus: Vec<Block> = (0..=n).map(|m| block(m, 1.0, u, phi, t)).collect();
    let ln_norm = log_binomial(n as u64, k0 as u64)?;
    let mut probs = Vec::with_capacity(n + 1);
    let mut derivs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let lo = k0.saturating_sub(n - i);
        let hi = i.min(k0);
        let mu: Vec<f64> = (lo..=hi)
            .map(|j| {
                let ln = log_binomial(n as u64, i as u64)? + log_binomial(i as u64, j as u64)?
                    + log_binomial((n - i) as u64, (k0 - j) as u64)?
                    - ln_norm;
                Ok((0.5 * ln).exp())
            })
            .collect::<Result<_>>()?;
        let (g1, g2) = (&minus[i], &plus[n - i]);
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        for (a, j) in (lo..=hi).enumerate() {
            for (b, jp) in (lo..=hi).enumerate() {
                let w = mu[a] * mu[b];
                let (x, y) = ((j, jp), (k0 - j, k0 - jp));
                s += g1.gamma[x] * g2.gamma[y] * w;
                ds += (g1.d_gamma[x] * g2.gamma[y] + g1.gamma[x] * g2.d_gamma[y]) * w;
            }
        }
        probs.push(s.re);
        derivs.push(ds.re);
    }
    Ok((probs, derivs))
}

/// Probabilities `s_i` of finding `i` excitations when every qubit is
/// projected onto `exp(-i alpha sigma_x)|0>, exp(-i alpha sigma_x)|1>`.
pub fn measurement_probabilities(scenario: &EstimationScenario, t: f64, alpha: f64) -> Result<Vec<f64>> {
    Ok(probabilities_impl(scenario, t, alpha)?.0)
}

/// `(s_i, d s_i / d omega)`.
pub fn measurement_probabilities_with_derivative(
    scenario: &EstimationScenario,
    t: f64,
    alpha: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    probabilities_impl(scenario, t, alpha)
}

/// Same statistics from the full-register simulation: projectors
/// `R pi_i R^dagger`, `R = exp(-i alpha sigma_x)` on every qubit.
pub fn oracle_measurement_probabilities(scenario: &EstimationScenario, t: f64, alpha: f64) -> Result<Vec<f64>> {
    let rho = evolved_state(scenario, t)?;
    Ok(rho.rotated_weight_probabilities(&rotation(Axis::X, 2.0 * alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::{Measurement, NoiseKind};

    fn scenario(n: usize, omega: f64, gamma: f64, noise: NoiseKind) -> EstimationScenario {
        EstimationScenario::new(n, omega, gamma, noise, Measurement::CollectiveZ).unwrap()
    }

    #[test]
    fn matches_oracle() {
        for n in [3usize, 5, 7] {
            for noise in [NoiseKind::BitFlip, NoiseKind::White] {
                let s = scenario(n, 1.0, 0.5, noise);
                let model = measurement_probabilities(&s, 0.7, 0.3).unwrap();
                let oracle = oracle_measurement_probabilities(&s, 0.7, 0.3).unwrap();
                for (a, b) in model.iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-10, "N={n} {noise:?}: {model:?} vs {oracle:?}");
                }
            }
        }
    }

    #[test]
    fn eigenstate_gives_a_deterministic_outcome() {
        let s = scenario(7, 0.0, 1e-300, NoiseKind::BitFlip);
        let p = measurement_probabilities(&s, 1.0, 0.0).unwrap();
        for (i, v) in p.iter().enumerate() {
            let want = if i == 3 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn normalised_and_derivative_matches_differences() {
        let s = scenario(9, 1.0, 0.5, NoiseKind::BitFlip);
        let (p, dp) = measurement_probabilities_with_derivative(&s, 1.3, 0.4).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let h = 1e-5;
        let up = measurement_probabilities(&EstimationScenario { omega: 1.0 + h, ..s }, 1.3, 0.4).unwrap();
        let dn = measurement_probabilities(&EstimationScenario { omega: 1.0 - h, ..s }, 1.3, 0.4).unwrap();
        for i in 0..p.len() {
            let fd = (up[i] - dn[i]) / (2.0 * h);
            assert!((fd - dp[i]).abs() < 1e-7, "{i}: {fd} vs {}", dp[i]);
        }
    }
}
