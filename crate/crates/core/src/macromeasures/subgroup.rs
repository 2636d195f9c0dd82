//! Optimal success probability for telling `|psi+>` from `|psi->` when only
//! `k` of the `N` qubits are measured: `P = 1/2 + ||rho_k^+ - rho_k^-||_1 / 4`.
//!
//! The two reduced states share their diagonal, so the difference is a
//! real symmetric tridiagonal matrix with zero diagonal and off-diagonal
//! entries `b_j = sqrt(c_j^{k0} c_{j+1}^{k0+1})`, `k0 = (N-1)/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::log_binomial;
use crate::error::{domain, require_odd, Result};
use crate::linalg::tridiagonal_trace_norm;

/// Largest `N` for which the exact chain is used as a fallback when the
/// asymptotic form is requested outside its range of validity.
pub const EXACT_FALLBACK_MAX_N: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgroupMode {
    Exact,
    /// Large-`N` limit, either keeping `k << N` qubits or dropping `N - k << N`.
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupResult {
    pub n_qubits: usize,
    pub k: usize,
    pub requested: SubgroupMode,
    pub used: SubgroupMode,
    pub probability: f64,
    /// Set when the asymptotic form was requested outside `k <= N/10` or `N - k <= N/10`.
    pub warning: Option<String>,
}

fn probability_from_chain(off: &[f64]) -> Result<f64> {
    if off.is_empty() {
        return Ok(0.5);
    }
    let diag = vec![0.0; off.len() + 1];
    Ok(0.5 + 0.25 * tridiagonal_trace_norm(&diag, off)?)
}

/// Off-diagonal entries of `rho_k^+ - rho_k^-` between `|k, j>` and `|k, j+1>`,
/// restricted to the indices where they can be non-zero.
pub fn exact_difference_chain(n_qubits: usize, k: usize) -> Result<Vec<f64>> {
    require_odd(n_qubits)?;
    if k == 0 || k > n_qubits {
        return domain(format!("subgroup size k = {k} outside [1, {n_qubits}]"));
    }
    let n = n_qubits;
    let k0 = (n - 1) / 2;
    let rest = n - k;
    let ln_a = log_binomial(n as u64, k0 as u64)?;
    let ln_b = log_binomial(n as u64, (k0 + 1) as u64)?;
    // both weights share the traced-out excitation number k0 - j
    let lo = k0.saturating_sub(rest);
    let hi = (k - 1).min(k0);
    (lo..=hi)
        .map(|j| {
            let r = (k0 - j) as u64;
            let ln_c0 = log_binomial(k as u64, j as u64)? + log_binomial(rest as u64, r)? - ln_a;
            let ln_c1 = log_binomial(k as u64, (j + 1) as u64)? + log_binomial(rest as u64, r)? - ln_b;
            Ok((0.5 * (ln_c0 + ln_c1)).exp())
        })
        .collect()
}

/// `N -> infinity` with `k` measured qubits: `b_j = 2^{-k} C(k, j) sqrt((k-j)/(j+1))`.
pub fn asymptotic_keep_probability(k: usize) -> Result<f64> {
    if k == 0 {
        return domain("subgroup size must be at least 1");
    }
    let off: Vec<f64> = (0..k)
        .map(|j| {
            let ln = log_binomial(k as u64, j as u64)? - k as f64 * std::f64::consts::LN_2
                + 0.5 * (((k - j) as f64) / ((j + 1) as f64)).ln();
            Ok(ln.exp())
        })
        .collect::<Result<_>>()?;
    probability_from_chain(&off)
}

/// `N -> infinity` with `dropped` qubits traced out: a chain of `dropped + 2`
/// levels with `b_r = 2^{-dropped} C(dropped, r)`.
pub fn asymptotic_drop_probability(dropped: usize) -> Result<f64> {
    let off: Vec<f64> = (0..=dropped)
        .map(|r| {
            Ok((log_binomial(dropped as u64, r as u64)? - dropped as f64 * std::f64::consts::LN_2).exp())
        })
        .collect::<Result<_>>()?;
    probability_from_chain(&off)
}

pub fn subgroup_success_probability(n_qubits: usize, k: usize, mode: SubgroupMode) -> Result<SubgroupResult> {
    require_odd(n_qubits)?;
    if k == 0 || k > n_qubits {
        return domain(format!("subgroup size k = {k} outside [1, {n_qubits}]"));
    }
    let exact = |warning| -> Result<SubgroupResult> {
        Ok(SubgroupResult {
            n_qubits,
            k,
            requested: mode,
            used: SubgroupMode::Exact,
            probability: probability_from_chain(&exact_difference_chain(n_qubits, k)?)?,
            warning,
        })
    };
    match mode {
        SubgroupMode::Exact => exact(None),
        SubgroupMode::Asymptotic => {
            let dropped = n_qubits - k;
            let keep_side = k <= dropped;
            let valid = 10 * k <= n_qubits || 10 * dropped <= n_qubits;
            if !valid && n_qubits <= EXACT_FALLBACK_MAX_N {
                return exact(Some(format!(
                    "k = {k} is not small against N = {n_qubits} or N - k; used the exact chain"
                )));
            }
            let probability = if keep_side {
                asymptotic_keep_probability(k)?
            } else {
                asymptotic_drop_probability(dropped)?
            };
            Ok(SubgroupResult {
                n_qubits,
                k,
                requested: mode,
                used: SubgroupMode::Asymptotic,
                probability,
                warning: (!valid).then(|| {
                    format!("asymptotic form used with k = {k}, N = {n_qubits} outside its validity range")
                }),
            })
        }
    }
}

/// `P(k)` for each `k` in `ks`, evaluated in parallel; order preserved.
pub fn subgroup_curve(n_qubits: usize, ks: &[usize], mode: SubgroupMode) -> Result<Vec<SubgroupResult>> {
    ks.par_iter()
        .map(|&k| subgroup_success_probability(n_qubits, k, mode))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_norm;
    use crate::symcore::{reduced_state, ReductionMode, Sign};
    use proptest::prelude::*;

    #[test]
    fn single_qubit_limit() {
        assert_eq!(asymptotic_keep_probability(1).unwrap(), 0.75);
        let r = subgroup_success_probability(1_000_001, 1, SubgroupMode::Asymptotic).unwrap();
        assert_eq!(r.probability, 0.75);
        assert!(r.warning.is_none());
    }

    #[test]
    fn dropping_one_qubit() {
        let want = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        assert!((asymptotic_drop_probability(1).unwrap() - want).abs() < 1e-15);
        let exact = subgroup_success_probability(100_001, 100_000, SubgroupMode::Exact).unwrap();
        assert!((exact.probability - want).abs() < 1e-4);
    }

    #[test]
    fn nothing_dropped_is_perfect() {
        assert!((asymptotic_drop_probability(0).unwrap() - 1.0).abs() < 1e-15);
        let r = subgroup_success_probability(7, 7, SubgroupMode::Exact).unwrap();
        assert!((r.probability - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_chain_matches_dense_reduced_states() {
        for n in [3usize, 7, 15] {
            for k in 1..=n {
                let p = reduced_state(n, Sign::Plus, k, ReductionMode::Exact).unwrap();
                let m = reduced_state(n, Sign::Minus, k, ReductionMode::Exact).unwrap();
                let dense = 0.5 + 0.25 * trace_norm(&(p.matrix - m.matrix));
                let chain = subgroup_success_probability(n, k, SubgroupMode::Exact).unwrap().probability;
                assert!((dense - chain).abs() < 1e-12, "N={n} k={k}: {dense} vs {chain}");
            }
        }
    }

    #[test]
    fn asymptotic_request_outside_range_falls_back() {
        let r = subgroup_success_probability(101, 50, SubgroupMode::Asymptotic).unwrap();
        assert_eq!(r.used, SubgroupMode::Exact);
        assert!(r.warning.is_some());
        let far = subgroup_success_probability(100_001, 50_000, SubgroupMode::Asymptotic).unwrap();
        assert_eq!(far.used, SubgroupMode::Asymptotic);
        assert!(far.warning.is_some());
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(subgroup_success_probability(7, 0, SubgroupMode::Exact).is_err());
        assert!(subgroup_success_probability(7, 8, SubgroupMode::Exact).is_err());
        assert!(subgroup_success_probability(8, 2, SubgroupMode::Exact).is_err());
    }

    #[test]
    fn probability_nondecreasing_in_k() {
        for half in 0..8 {
            let n = 2 * half + 1;
            let mut last = 0.5;
            for k in 1..=n {
                let p = subgroup_success_probability(n, k, SubgroupMode::Exact).unwrap().probability;
                assert!(p >= last - 1e-12, "N={n} k={k}: {p} < {last}");
                assert!((0.5..=1.0 + 1e-12).contains(&p));
                last = p;
            }
        }
    }

    proptest! {
        #[test]
        fn probabilities_in_range(half in 0usize..400, frac in 0.0f64..=1.0) {
            let n = 2 * half + 1;
            let k = 1 + ((n - 1) as f64 * frac) as usize;
            let p = subgroup_success_probability(n, k, SubgroupMode::Exact).unwrap().probability;
            prop_assert!((0.5..=1.0 + 1e-12).contains(&p));
        }
    }
}
