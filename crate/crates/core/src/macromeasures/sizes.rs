//! Effective sizes of the micro-macro state.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::covariance::max_local_variance;
use super::subgroup::{subgroup_success_probability, SubgroupMode};
use crate::error::{domain, require_odd, Error, Result};
use crate::linalg::trace_norm;
use crate::symcore::{
    micro_macro_branch, micro_macro_expectation, micro_macro_state, reduced_operator, Axis, Branch,
    CollectiveObservable, MicroOperator,
};

pub const DEFAULT_KORSBAKKEN_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KorsbakkenResult {
    pub size: f64,
    pub threshold: f64,
    /// Smallest measured group reaching the threshold, if any `k <= N/2` does.
    pub k_star: Option<usize>,
    /// `(k, P(k))` for `k = 1..=N/2`.
    pub curve: Vec<(usize, f64)>,
}

/// Number of groups into which the state can be split so that each group on
/// its own still identifies the branch with probability at least `threshold`:
/// `N / k* + 1`, or 2 when no group of at most half the register suffices.
pub fn korsbakken_effective_size(n_qubits: usize, threshold: f64) -> Result<KorsbakkenResult> {
    require_odd(n_qubits)?;
    if !(threshold > 0.5 && threshold < 1.0) {
        return domain(format!("threshold {threshold} outside (1/2, 1)"));
    }
    let ks: Vec<usize> = (1..=n_qubits / 2).collect();
    let curve: Vec<(usize, f64)> = ks
        .par_iter()
        .map(|&k| Ok((k, subgroup_success_probability(n_qubits, k, SubgroupMode::Exact)?.probability)))
        .collect::<Result<_>>()?;
    let k_star = curve.iter().find(|(_, p)| *p >= threshold).map(|&(k, _)| k);
    let size = match k_star {
        Some(k) => n_qubits as f64 / k as f64 + 1.0,
        None => 2.0,
    };
    Ok(KorsbakkenResult {
        size,
        threshold,
        k_star,
        curve,
    })
}

/// Evidence that two local operations map one branch onto the other while
/// no single-site operation of unit norm does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarquardtCertificate {
    pub size: usize,
    /// `|<phi_1| sigma_z (x) M_z |phi_0>|`
    pub two_site_overlap: f64,
    /// `max |<phi_1| A |phi_0>|` over unit-norm operators on the micro qubit.
    pub micro_site_overlap: f64,
    /// Same, over unit-norm operators on one macro qubit.
    pub macro_site_overlap: f64,
}

const MARQUARDT_EPS: f64 = 1e-6;

pub fn marquardt_check(n_qubits: usize) -> Result<MarquardtCertificate> {
    require_odd(n_qubits)?;
    let phi0 = micro_macro_branch::<f64>(n_qubits, Branch::Zero)?;
    let phi1 = micro_macro_branch::<f64>(n_qubits, Branch::One)?;
    let two_site = micro_macro_expectation(
        &phi1,
        &MicroOperator::pauli(Axis::Z),
        &[CollectiveObservable::new(Axis::Z)],
        &phi0,
    )?
    .norm();

    // For an operator on one site the amplitude factorises into the overlap of
    // the untouched parts times Tr(A X) with X the reduced transition operator,
    // and the supremum of |Tr(A X)| over ||A|| <= 1 is ||X||_1.
    let (m0, m1) = (phi0.macro_plus().normalized(), phi1.macro_minus().normalized());
    let macro_overlap = m1.inner(&m0)?.norm();
    let micro_transition = trace_norm(&nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    ));
    let micro_site = macro_overlap * micro_transition;
    // micro qubits |+> and |-> are orthogonal
    let micro_untouched = 0.0;
    let macro_site = micro_untouched * trace_norm(&reduced_operator(&m0, &m1, 1)?);

    if (two_site - 1.0).abs() > 1e-10 {
        return Err(Error::InternalConsistency(format!(
            "sigma_z (x) M_z maps phi_0 onto phi_1 with overlap {two_site}, expected 1"
        )));
    }
    if micro_site.max(macro_site) > 1.0 - MARQUARDT_EPS {
        return Err(Error::InternalConsistency(format!(
            "a single-site operation reaches overlap {}",
            micro_site.max(macro_site)
        )));
    }
    Ok(MarquardtCertificate {
        size: 2,
        two_site_overlap: two_site,
        micro_site_overlap: micro_site,
        macro_site_overlap: macro_site,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSizeReport {
    pub n_qubits: usize,
    pub korsbakken: f64,
    pub marquardt: f64,
    pub relative_fisher: f64,
    pub index_p_size: f64,
    pub fisher_size: f64,
}

/// All five effective sizes of the micro-macro state with `N` macro qubits.
pub fn effective_sizes(n_qubits: usize, korsbakken_threshold: f64) -> Result<EffectiveSizeReport> {
    require_odd(n_qubits)?;
    let korsbakken = korsbakken_effective_size(n_qubits, korsbakken_threshold)?.size;
    let marquardt = marquardt_check(n_qubits)?.size as f64;
    let v_psi = max_local_variance(&micro_macro_state::<f64>(n_qubits)?)?.variance;
    let v_phi0 = max_local_variance(&micro_macro_branch::<f64>(n_qubits, Branch::Zero)?)?.variance;
    // pure states: F = 4V and the per-qubit normalisation gives V / N
    let fisher_size = v_psi / n_qubits as f64;
    Ok(EffectiveSizeReport {
        n_qubits,
        korsbakken,
        marquardt,
        relative_fisher: v_psi / v_phi0,
        index_p_size: fisher_size,
        fisher_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn korsbakken_is_two_at_high_threshold() {
        for n in [1usize, 3, 7, 25, 101] {
            let r = korsbakken_effective_size(n, DEFAULT_KORSBAKKEN_THRESHOLD).unwrap();
            assert_eq!(r.size, 2.0, "N={n}");
            assert!(r.k_star.is_none());
        }
        assert_eq!(korsbakken_effective_size(1001, 0.90).unwrap().size, 2.0);
    }

    #[test]
    fn korsbakken_low_threshold_counts_single_qubits() {
        let r = korsbakken_effective_size(201, 0.51).unwrap();
        assert_eq!(r.k_star, Some(1));
        assert_eq!(r.size, 202.0);
        assert!(korsbakken_effective_size(5, 0.5).is_err());
        assert!(korsbakken_effective_size(5, 1.0).is_err());
    }

    #[test]
    fn marquardt_certificate() {
        for n in [1usize, 3, 7, 31] {
            let c = marquardt_check(n).unwrap();
            assert_eq!(c.size, 2);
            assert!((c.two_site_overlap - 1.0).abs() < 1e-12);
            assert!(c.micro_site_overlap < 1e-12 && c.macro_site_overlap < 1e-12);
        }
    }

    #[test]
    fn report_closed_forms() {
        for n in [3usize, 9, 21, 101] {
            let r = effective_sizes(n, DEFAULT_KORSBAKKEN_THRESHOLD).unwrap();
            let nf = n as f64;
            assert!((r.relative_fisher - (1.0 + 2.0 / (nf + 1.0))).abs() < 1e-12);
            assert!((r.fisher_size - (nf / 2.0 + 2.0 + 1.5 / nf)).abs() < 1e-10);
            assert_eq!(r.marquardt, 2.0);
            assert_eq!(r.korsbakken, 2.0);
        }
        let r = effective_sizes(9, DEFAULT_KORSBAKKEN_THRESHOLD).unwrap();
        assert!((r.relative_fisher - 1.2).abs() < 1e-12);
        assert!((r.fisher_size - (4.5 + 2.0 + 3.0 / 18.0)).abs() < 1e-12);
    }
}
