//! Distinguishing the two cloner branches `|psi+>` and `|psi->` with a
//! collective `M_x` measurement, sharp or degraded.
//!
//! All scenarios produce a pair of outcome distributions over the number `i`
//! of `|->` results (`i = 0..=N`) and are scored by `D = 1/2 + Delta/4`,
//! `Delta` the l1 distance of the two distributions.

mod extrapolate;

pub use extrapolate::{extrapolate_limit, LimitFit};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{log_binomial, BinomialTable};
use crate::error::{domain, Error, Result};
use crate::scalar::{Real, Scalar};
use crate::symcore::{cloner_x_probabilities, Sign};

/// How the outcome `i` is read out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeasurementSpec {
    Sharp,
    /// Neighbouring outcomes `(0, 1), (2, 3), ...` are merged.
    PairCoarsened,
    /// Gaussian blur of width `sigma` in the outcome index.
    GaussianPovm { sigma: f64 },
    /// Every qubit's `x` result is flipped with probability `1 - u` before readout.
    NoisyInput { u: f64 },
}

impl MeasurementSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MeasurementSpec::GaussianPovm { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                domain(format!("POVM width sigma = {sigma} must be positive"))
            }
            MeasurementSpec::NoisyInput { u } if !(0.5..=1.0).contains(&u) => {
                domain(format!("noise parameter u = {u} outside [1/2, 1]"))
            }
            _ => Ok(()),
        }
    }
}

/// Outcome probabilities for `|psi+>` and `|psi->`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution<S> {
    pub probs_plus: Vec<S>,
    pub probs_minus: Vec<S>,
}

impl<S: Scalar> OutcomeDistribution<S> {
    pub fn len(&self) -> usize {
        self.probs_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs_plus.is_empty()
    }

    pub fn totals(&self) -> (S, S) {
        let sum = |v: &[S]| v.iter().fold(S::zero(), |a, b| a + b.clone());
        (sum(&self.probs_plus), sum(&self.probs_minus))
    }

    /// Same length, sums within `tol` of one, no entry below `-tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.probs_plus.len() != self.probs_minus.len() {
            return domain("distributions over different outcome sets");
        }
        let (a, b) = self.totals();
        for (name, total) in [("plus", a), ("minus", b)] {
            if (total.to_f64_lossy() - 1.0).abs() > tol {
                return Err(Error::NumericalHealth(format!(
                    "{name} distribution sums to {}",
                    total.to_f64_lossy()
                )));
            }
        }
        if self
            .probs_plus
            .iter()
            .chain(&self.probs_minus)
            .any(|p| p.to_f64_lossy() < -tol)
        {
            return Err(Error::NumericalHealth("negative outcome probability".into()));
        }
        Ok(())
    }

    /// `sum_i |p_i^+ - p_i^-|`.
    pub fn l1_distance(&self) -> S {
        self.probs_plus
            .iter()
            .zip(&self.probs_minus)
            .fold(S::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs_val())
    }

    /// Merges outcomes `(0, 1), (2, 3), ...`; a trailing odd outcome stays alone.
    pub fn pair_coarsened(&self) -> Self {
        let merge = |v: &[S]| -> Vec<S> {
            v.chunks(2)
                .map(|c| c.iter().fold(S::zero(), |a, b| a + b.clone()))
                .collect()
        };
        Self {
            probs_plus: merge(&self.probs_plus),
            probs_minus: merge(&self.probs_minus),
        }
    }

    pub fn to_f64(&self) -> OutcomeDistribution<f64> {
        let conv = |v: &[S]| v.iter().map(Scalar::to_f64_lossy).collect();
        OutcomeDistribution {
            probs_plus: conv(&self.probs_plus),
            probs_minus: conv(&self.probs_minus),
        }
    }
}

/// `D = 1/2 + Delta/4`.
pub fn distinguishability<S: Scalar>(dist: &OutcomeDistribution<S>) -> S {
    S::from_ratio(&1.into(), &2.into()) + dist.l1_distance() / S::from_int(4)
}

/// Sharp `M_x` statistics: `|psi+>` only yields even `i`, `|psi->` odd `i`.
pub fn sharp_probabilities<S: Scalar>(n_qubits: usize) -> Result<OutcomeDistribution<S>> {
    Ok(OutcomeDistribution {
        probs_plus: cloner_x_probabilities(n_qubits, Sign::Plus)?,
        probs_minus: cloner_x_probabilities(n_qubits, Sign::Minus)?,
    })
}

/// `Delta` after merging neighbouring outcomes.
pub fn pair_coarsened_delta<S: Scalar>(n_qubits: usize) -> Result<S> {
    Ok(sharp_probabilities::<S>(n_qubits)?.pair_coarsened().l1_distance())
}

/// `<E_i^2>` for the Gaussian POVM `E_i = sum_k n_k^{-1/2} exp(-(i-k)^2/(4 sigma^2)) pi_k`,
/// `n_k = sum_{i=0}^{N} exp(-(i-k)^2/(2 sigma^2))`, so that `sum_i E_i^2 = 1`.
pub fn povm_probabilities<S: Real>(n_qubits: usize, sigma: S) -> Result<OutcomeDistribution<S>> {
    MeasurementSpec::GaussianPovm {
        sigma: sigma.to_f64_lossy(),
    }
    .validate()?;
    let sharp = sharp_probabilities::<S>(n_qubits)?;
    let two_var = S::from_int(2) * sigma * sigma;
    let kernel: Vec<Vec<S>> = (0..=n_qubits)
        .map(|k| {
            let row: Vec<S> = (0..=n_qubits)
                .map(|i| {
                    let d = S::from_usize(i).unwrap() - S::from_usize(k).unwrap();
                    (-(d * d) / two_var).exp()
                })
                .collect();
            let norm = row.iter().fold(S::zero(), |a, &b| a + b);
            row.into_iter().map(|w| w / norm).collect()
        })
        .collect();
    let blur = |p: &[S]| -> Vec<S> {
        (0..=n_qubits)
            .map(|i| (0..=n_qubits).fold(S::zero(), |acc, k| acc + p[k] * kernel[k][i]))
            .collect()
    };
    Ok(OutcomeDistribution {
        probs_plus: blur(&sharp.probs_plus),
        probs_minus: blur(&sharp.probs_minus),
    })
}

/// Transition probabilities `eta[k][i]` for independent flips of every
/// outcome with probability `1 - u`.
fn flip_kernel<S: Scalar>(n: usize, u: &S) -> Vec<Vec<S>> {
    let mut eta = vec![vec![S::zero(); n + 1]; n + 1];
    if S::EXACT {
        let table = BinomialTable::<S>::new(n);
        let v = S::one() - u.clone();
        let mut pu = vec![S::one(); n + 1];
        let mut pv = vec![S::one(); n + 1];
        for e in 1..=n {
            pu[e] = pu[e - 1].clone() * u.clone();
            pv[e] = pv[e - 1].clone() * v.clone();
        }
        for (k, row) in eta.iter_mut().enumerate() {
            for a in 0..=k {
                for b in 0..=n - k {
                    let w = table.get(k as i64, a as i64)
                        * table.get((n - k) as i64, b as i64)
                        * pu[n - a - b].clone()
                        * pv[a + b].clone();
                    let i = k - a + b;
                    row[i] = row[i].clone() + w;
                }
            }
        }
    } else {
        let uf = u.to_f64_lossy();
        let (lu, lv) = (uf.ln(), (1.0 - uf).ln());
        let xlog = |m: usize, l: f64| if m == 0 { 0.0 } else { m as f64 * l };
        let lb = |n: usize, k: usize| log_binomial(n as u64, k as u64).expect("k <= n");
        for (k, row) in eta.iter_mut().enumerate() {
            let mut acc = vec![0.0f64; n + 1];
            for a in 0..=k {
                for b in 0..=n - k {
                    let ln = lb(k, a) + lb(n - k, b) + xlog(n - a - b, lu) + xlog(a + b, lv);
                    acc[k - a + b] += ln.exp();
                }
            }
            for (dst, src) in row.iter_mut().zip(acc) {
                *dst = S::from_f64(src).unwrap_or_else(S::zero);
            }
        }
    }
    eta
}

/// Statistics after each qubit's `x` outcome is flipped with probability `1 - u`.
pub fn noisy_probabilities<S: Scalar>(n_qubits: usize, u: S) -> Result<OutcomeDistribution<S>> {
    MeasurementSpec::NoisyInput { u: u.to_f64_lossy() }.validate()?;
    let sharp = sharp_probabilities::<S>(n_qubits)?;
    let eta = flip_kernel(n_qubits, &u);
    let apply = |p: &[S]| -> Vec<S> {
        let mut out = vec![S::zero(); n_qubits + 1];
        for (k, pk) in p.iter().enumerate() {
            if pk.is_zero() {
                continue;
            }
            for (i, e) in eta[k].iter().enumerate() {
                out[i] = out[i].clone() + pk.clone() * e.clone();
            }
        }
        out
    };
    Ok(OutcomeDistribution {
        probs_plus: apply(&sharp.probs_plus),
        probs_minus: apply(&sharp.probs_minus),
    })
}

/// Outcome distributions for any measurement scenario in `f64`.
pub fn outcome_distribution(n_qubits: usize, spec: MeasurementSpec) -> Result<OutcomeDistribution<f64>> {
    spec.validate()?;
    match spec {
        MeasurementSpec::Sharp => sharp_probabilities(n_qubits),
        MeasurementSpec::PairCoarsened => Ok(sharp_probabilities::<f64>(n_qubits)?.pair_coarsened()),
        MeasurementSpec::GaussianPovm { sigma } => povm_probabilities(n_qubits, sigma),
        MeasurementSpec::NoisyInput { u } => noisy_probabilities(n_qubits, u),
    }
}

/// `D` for one scenario.
pub fn scenario_distinguishability(n_qubits: usize, spec: MeasurementSpec) -> Result<f64> {
    let dist = outcome_distribution(n_qubits, spec)?;
    dist.validate(1e-10)?;
    Ok(distinguishability(&dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn sharp_supports_are_disjoint() {
        for n in [1usize, 3, 7, 21] {
            let d = sharp_probabilities::<Rational>(n).unwrap();
            assert_eq!(d.totals(), (q(1, 1), q(1, 1)));
            for (a, b) in d.probs_plus.iter().zip(&d.probs_minus) {
                assert!(a.is_zero() || b.is_zero());
            }
            assert_eq!(distinguishability(&d), q(1, 1));
        }
    }

    #[test]
    fn single_qubit_pairing_merges_everything() {
        assert_eq!(pair_coarsened_delta::<Rational>(1).unwrap(), q(0, 1));
    }

    #[test]
    fn pairing_from_either_end_agrees() {
        for half in 0..8 {
            let n = 2 * half + 1;
            let d = sharp_probabilities::<Rational>(n).unwrap();
            let reversed = OutcomeDistribution {
                probs_plus: d.probs_plus.iter().rev().cloned().collect(),
                probs_minus: d.probs_minus.iter().rev().cloned().collect(),
            };
            assert_eq!(d.pair_coarsened().l1_distance(), reversed.pair_coarsened().l1_distance());
        }
    }

    #[test]
    fn pair_coarsened_at_n31() {
        let delta: f64 = pair_coarsened_delta(31).unwrap();
        let d = 0.5 + delta / 4.0;
        assert!((0.80..=0.86).contains(&d), "{d}");
    }

    #[test]
    fn noiseless_flip_kernel_is_sharp() {
        for n in [3usize, 9] {
            assert_eq!(noisy_probabilities(n, q(1, 1)).unwrap(), sharp_probabilities(n).unwrap());
            let f = noisy_probabilities(n, 1.0f64).unwrap();
            let s = sharp_probabilities::<f64>(n).unwrap();
            assert_eq!(f, s);
        }
    }

    #[test]
    fn fully_random_flips_erase_the_branch() {
        let d = noisy_probabilities(7, q(1, 2)).unwrap();
        assert_eq!(d.probs_plus, d.probs_minus);
        assert_eq!(distinguishability(&d), q(1, 2));
    }

    #[test]
    fn exact_and_float_noise_agree() {
        let e = noisy_probabilities(11, q(9, 10)).unwrap();
        let f = noisy_probabilities(11, 0.9f64).unwrap();
        for (a, b) in e.to_f64().probs_plus.iter().zip(&f.probs_plus) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(e.totals(), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn povm_is_complete_and_sharp_in_the_narrow_limit() {
        let d = povm_probabilities(7, 2.0f64).unwrap();
        d.validate(1e-10).unwrap();
        let narrow = povm_probabilities(7, 1e-3f64).unwrap();
        let sharp = sharp_probabilities::<f64>(7).unwrap();
        for (a, b) in narrow.probs_plus.iter().zip(&sharp.probs_plus) {
            assert!((a - b).abs() < 1e-12);
        }
        let wide = povm_probabilities(31, 1.0f64).unwrap();
        assert!(distinguishability(&wide) < 0.9);
    }

    #[test]
    fn povm_single_precision() {
        let d = povm_probabilities(9, 3.0f32).unwrap();
        let (a, b) = d.totals();
        assert!((a - 1.0).abs() < 1e-5 && (b - 1.0).abs() < 1e-5);
    }

    #[test]
    fn povm_distinguishability_nonincreasing_in_sigma() {
        for n in [5usize, 15, 31] {
            let top = 2.0 * (n as f64).sqrt();
            let mut last = f64::INFINITY;
            let mut sigma = 0.1;
            while sigma <= top + 1e-12 {
                let d = distinguishability(&povm_probabilities(n, sigma).unwrap());
                assert!(d <= last + 1e-12, "N={n} sigma={sigma}: {d} > {last}");
                last = d;
                sigma += 0.1;
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(povm_probabilities(5, 0.0f64).is_err());
        assert!(noisy_probabilities(5, 0.4f64).is_err());
        assert!(noisy_probabilities(5, 1.1f64).is_err());
        assert!(sharp_probabilities::<f64>(4).is_err());
    }
}
