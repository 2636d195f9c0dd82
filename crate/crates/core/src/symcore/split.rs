//! Splitting a Dicke state into a `k`-qubit and an `(N-k)`-qubit part:
//! `|N, x> = sum_j sqrt(c_j^x) |k, j> (x) |N-k, x-j>` with the hypergeometric
//! weights `c_j^x = C(k, j) C(N-k, x-j) / C(N, x)`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use super::basis::Sign;
use super::state::{cloner_state, SymmetricPureState};
use crate::combinatorics::{binomial_exact, log_binomial};
use crate::error::{domain, require_odd, Result};
use crate::scalar::Scalar;

/// Weights `c_j^x` for `j = 0..=k`; entries with `x - j` outside `[0, N-k]` are zero.
pub fn split_coefficients<S: Scalar>(n: usize, k: usize, x: usize) -> Result<Vec<S>> {
    if k > n || x > n {
        return domain(format!("split of |{n}, {x}> into {k} qubits"));
    }
    let rest = n - k;
    let valid = |j: usize| j <= x && x - j <= rest;
    if S::EXACT {
        let den = BigInt::from(binomial_exact(n as u64, x as u64));
        Ok((0..=k)
            .map(|j| {
                if !valid(j) {
                    return S::zero();
                }
                let num = BigInt::from(binomial_exact(k as u64, j as u64))
                    * BigInt::from(binomial_exact(rest as u64, (x - j) as u64));
                S::from_ratio(&num, &den)
            })
            .collect())
    } else {
        let ln_den = log_binomial(n as u64, x as u64)?;
        (0..=k)
            .map(|j| {
                if !valid(j) {
                    return Ok(S::zero());
                }
                let ln = log_binomial(k as u64, j as u64)? + log_binomial(rest as u64, (x - j) as u64)? - ln_den;
                Ok(S::from_f64(ln.exp()).expect("finite weight"))
            })
            .collect()
    }
}

/// Split table of a state: one row `(x, [c_0^x, ..., c_k^x])` per excitation
/// number `x` in the state's support.
pub fn bipartite_split<S: Scalar>(state: &SymmetricPureState<S>, k: usize) -> Result<Vec<(usize, Vec<S>)>> {
    let n = state.n_qubits();
    if k > n {
        return domain(format!("subgroup of {k} qubits out of {n}"));
    }
    state
        .support()
        .map(|x| Ok((x, split_coefficients::<S>(n, k, x)?)))
        .collect()
}

/// Large-`N` treatment of the reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionMode {
    Exact,
    /// `c_j^x -> C(k, j) / 2^k`, valid for `k << N`.
    Asymptotic,
}

/// Density operator of `k` qubits on their symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub k: usize,
    pub matrix: DMatrix<Complex64>,
}

impl ReducedState {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Checks trace one, hermiticity and positivity within the given tolerances.
    pub fn is_valid(&self, tol: f64, psd_tol: f64) -> bool {
        if (self.trace() - Complex64::new(1.0, 0.0)).norm() > tol {
            return false;
        }
        if (&self.matrix - self.matrix.adjoint()).iter().any(|z| z.norm() > tol) {
            return false;
        }
        let (vals, _) = crate::linalg::hermitian_eigen(&self.matrix);
        vals.iter().all(|&v| v >= -psd_tol)
    }
}

/// `Tr_{N-k} |left><right|` on the `k`-qubit symmetric subspace, expressed in
/// the common basis of the two states.
pub fn reduced_operator(
    left: &SymmetricPureState<f64>,
    right: &SymmetricPureState<f64>,
    k: usize,
) -> Result<DMatrix<Complex64>> {
    left.check_compatible(right)?;
    let n = left.n_qubits();
    if k > n {
        return domain(format!("subgroup of {k} qubits out of {n}"));
    }
    let l = left.amplitudes()?;
    let r = right.amplitudes()?;
    let tables: Vec<Vec<f64>> = (0..=n)
        .map(|x| split_coefficients::<f64>(n, k, x))
        .collect::<Result<_>>()?;
    let mut out = DMatrix::<Complex64>::zeros(k + 1, k + 1);
    for x in 0..=n {
        if l[x] == Complex::new(0.0, 0.0) {
            continue;
        }
        for (j, &cj) in tables[x].iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            // the traced-out part carries x - j excitations on both sides
            let remainder = x - j;
            for jp in 0..=k {
                let xp = remainder + jp;
                if xp > n || r[xp] == Complex::new(0.0, 0.0) {
                    continue;
                }
                let cjp = tables[xp][jp];
                out[(j, jp)] += l[x] * r[xp].conj() * (cj * cjp).sqrt();
            }
        }
    }
    Ok(out)
}

/// Reduced state `rho_k^+-` of the cloner branch on `k` of its `N` qubits.
pub fn reduced_state(n_qubits: usize, sign: Sign, k: usize, mode: ReductionMode) -> Result<ReducedState> {
    require_odd(n_qubits)?;
    if k == 0 || k > n_qubits {
        return domain(format!("subgroup size k = {k} outside [1, {n_qubits}]"));
    }
    let matrix = match mode {
        ReductionMode::Exact => {
            let s = cloner_state::<f64>(n_qubits, sign)?;
            reduced_operator(&s, &s, k)?
        }
        ReductionMode::Asymptotic => {
            let w: Vec<f64> = (0..=k)
                .map(|j| Ok((log_binomial(k as u64, j as u64)? - k as f64 * std::f64::consts::LN_2).exp()))
                .collect::<Result<_>>()?;
            let mut m = DMatrix::<Complex64>::zeros(k + 1, k + 1);
            for j in 0..=k {
                m[(j, j)] = Complex64::new(w[j], 0.0);
                if j < k {
                    let off = 0.5 * sign.factor() as f64 * (w[j] * w[j + 1]).sqrt();
                    m[(j + 1, j)] = Complex64::new(off, 0.0);
                    m[(j, j + 1)] = Complex64::new(off, 0.0);
                }
            }
            m
        }
    };
    Ok(ReducedState { k, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    #[test]
    fn empty_and_full_subgroups() {
        let s = cloner_state::<Rational>(5, Sign::Plus).unwrap();
        for (_, row) in bipartite_split(&s, 0).unwrap() {
            assert_eq!(row, vec![Rational::one()]);
        }
        for (x, row) in bipartite_split(&s, 5).unwrap() {
            for (j, c) in row.iter().enumerate() {
                assert_eq!(c.is_one(), j == x);
                assert_eq!(c.is_zero(), j != x);
            }
        }
    }

    #[test]
    fn full_subgroup_returns_pure_state() {
        let r = reduced_state(5, Sign::Minus, 5, ReductionMode::Exact).unwrap();
        let s = cloner_state::<f64>(5, Sign::Minus).unwrap();
        for a in 0..=5 {
            for b in 0..=5 {
                assert!((r.matrix[(a, b)] - s.density_entry(a, b)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_qubit_asymptotic_marginal() {
        let r = reduced_state(10_001, Sign::Plus, 1, ReductionMode::Asymptotic).unwrap();
        assert!((r.matrix[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((r.matrix[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((r.matrix[(0, 1)].re - 0.25).abs() < 1e-15);
        let e = reduced_state(10_001, Sign::Plus, 1, ReductionMode::Exact).unwrap();
        assert!((e.matrix - r.matrix).iter().all(|z| z.norm() < 1e-4));
    }

    proptest! {
        #[test]
        fn split_weights_sum_to_one(half in 0usize..30, k_frac in 0.0f64..=1.0, x_frac in 0.0f64..=1.0) {
            let n = 2 * half + 1;
            let k = ((n as f64) * k_frac).round() as usize;
            let x = ((n as f64) * x_frac).round() as usize;
            let exact = split_coefficients::<Rational>(n, k, x).unwrap();
            prop_assert!(exact.iter().fold(Rational::zero(), |a, b| a + b).is_one());
            let float: f64 = split_coefficients::<f64>(n, k, x).unwrap().iter().sum();
            prop_assert!((float - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reduced_states_are_valid(half in 0usize..12, k_frac in 0.0f64..=1.0, plus in any::<bool>()) {
            let n = 2 * half + 1;
            let k = 1 + ((n - 1) as f64 * k_frac).round() as usize;
            let sign = if plus { Sign::Plus } else { Sign::Minus };
            let r = reduced_state(n, sign, k, ReductionMode::Exact).unwrap();
            prop_assert!(r.is_valid(1e-12, 1e-10));
        }
    }
}
