//! Covariance matrices of local spin operators and the maximal variance of a
//! sum of local operators.
//!
//! With micro operators `sigma_{x,y,z}` and macro operators `M_{x,y,z}` the
//! candidate `H = sum_j a_j sigma_j + b_j M_j` has variance `alpha^T C alpha`,
//! `C_ab = Re<A_a A_b> - <A_a><A_b>`. Every qubit carries a unit-norm local
//! operator when `|a| = |b| = 1`; the relaxed constraint
//! `alpha^T W alpha = N + 1`, `W = diag(1, 1, 1, N, N, N)`, turns the search
//! into the generalized eigenproblem `C alpha = lambda W alpha` with
//! `V = (N + 1) lambda_max`. The relaxation is tight whenever its optimiser
//! happens to satisfy both unit norms; for product states the two parts are
//! maximised separately.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symcore::{
    expectation_and_variance, matrix_element, micro_macro_expectation, Axis, CollectiveObservable,
    MicroMacroState, MicroOperator, SymmetricPureState,
};
use crate::Rational;

/// Borrowed state accepted by the covariance routines.
#[derive(Debug)]
pub enum StateRef<'a, S> {
    MicroMacro(&'a MicroMacroState<S>),
    Symmetric(&'a SymmetricPureState<S>),
}

impl<S> Clone for StateRef<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for StateRef<'_, S> {}

impl<'a, S> From<&'a MicroMacroState<S>> for StateRef<'a, S> {
    fn from(s: &'a MicroMacroState<S>) -> Self {
        StateRef::MicroMacro(s)
    }
}

impl<'a, S> From<&'a SymmetricPureState<S>> for StateRef<'a, S> {
    fn from(s: &'a SymmetricPureState<S>) -> Self {
        StateRef::Symmetric(s)
    }
}

impl<S> StateRef<'_, S> {
    fn n_macro(&self) -> usize
    where
        S: Scalar,
    {
        match self {
            StateRef::MicroMacro(s) => s.n_macro(),
            StateRef::Symmetric(s) => s.n_qubits(),
        }
    }
}

/// Real symmetric covariance matrix; rows ordered
/// `(sigma_x, sigma_y, sigma_z, M_x, M_y, M_z)` or `(M_x, M_y, M_z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<S> {
    dim: usize,
    entries: Vec<S>,
}

impl<S: Scalar> CovarianceMatrix<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.entries[r * self.dim + c]
    }

    pub fn labels(&self) -> &'static [&'static str] {
        if self.dim == 6 {
            &["sigma_x", "sigma_y", "sigma_z", "M_x", "M_y", "M_z"]
        } else {
            &["M_x", "M_y", "M_z"]
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c).to_f64_lossy())
    }

    /// `alpha^T C alpha`.
    pub fn quadratic_form(&self, alpha: &[S]) -> S {
        let mut acc = S::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc = acc + alpha[r].clone() * self.get(r, c).clone() * alpha[c].clone();
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy)]
enum Term {
    Micro(Axis),
    Macro(Axis),
}

const MICRO_MACRO_TERMS: [Term; 6] = [
    Term::Micro(Axis::X),
    Term::Micro(Axis::Y),
    Term::Micro(Axis::Z),
    Term::Macro(Axis::X),
    Term::Macro(Axis::Y),
    Term::Macro(Axis::Z),
];

fn split_term<S: Scalar>(t: Term) -> (MicroOperator, Vec<CollectiveObservable<S>>) {
    match t {
        Term::Micro(a) => (MicroOperator::pauli(a), vec![]),
        Term::Macro(a) => (MicroOperator::identity(), vec![CollectiveObservable::new(a)]),
    }
}

fn micro_macro_covariance<S: Scalar>(state: &MicroMacroState<S>) -> Result<CovarianceMatrix<S>> {
    let mean = |t: Term| -> Result<S> {
        let (m, w) = split_term::<S>(t);
        Ok(micro_macro_expectation(state, &m, &w, state)?.re)
    };
    let means: Vec<S> = MICRO_MACRO_TERMS.iter().map(|&t| mean(t)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(36);
    for (r, &tr) in MICRO_MACRO_TERMS.iter().enumerate() {
        for (c, &tc) in MICRO_MACRO_TERMS.iter().enumerate() {
            let (mr, mut wr) = split_term::<S>(tr);
            let (mc, wc) = split_term::<S>(tc);
            wr.extend(wc);
            let second = micro_macro_expectation(state, &mr.mul(&mc), &wr, state)?.re;
            entries.push(second - means[r].clone() * means[c].clone());
        }
    }
    Ok(CovarianceMatrix { dim: 6, entries })
}

fn symmetric_covariance<S: Scalar>(state: &SymmetricPureState<S>) -> Result<CovarianceMatrix<S>> {
    let means: Vec<S> = Axis::ALL
        .iter()
        .map(|&a| Ok(expectation_and_variance(state, &CollectiveObservable::new(a))?.0))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(9);
    for (r, &ar) in Axis::ALL.iter().enumerate() {
        for (c, &ac) in Axis::ALL.iter().enumerate() {
            let word = [CollectiveObservable::new(ar), CollectiveObservable::new(ac)];
            let second = matrix_element(state, &word, state)?.re;
            entries.push(second - means[r].clone() * means[c].clone());
        }
    }
    Ok(CovarianceMatrix { dim: 3, entries })
}

/// Covariance matrix of the local spin operators (6x6 for micro-macro states,
/// 3x3 for a bare symmetric register). Exact in rational arithmetic.
pub fn covariance_matrix<'a, S: Scalar>(state: impl Into<StateRef<'a, S>>) -> Result<CovarianceMatrix<S>> {
    match state.into() {
        StateRef::MicroMacro(s) => micro_macro_covariance(s),
        StateRef::Symmetric(s) => symmetric_covariance(s),
    }
}

/// How the reported maximum was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarianceMethod {
    /// Symmetric register alone: plain eigenvalue problem.
    SingleBlock,
    /// Relaxed optimiser satisfies the per-qubit unit norms, so it is optimal.
    TightRelaxation,
    /// Product state: micro and macro maxima added.
    ProductAdditivity,
    /// Only the relaxed value is available; it is an upper bound.
    RelaxationBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalVarianceOptimum {
    pub variance: f64,
    /// Per-qubit operator coefficients, ordered like the covariance rows.
    pub coefficients: Vec<f64>,
    pub method: VarianceMethod,
}

fn top_eigen(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let (i, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    let mut v = eig.eigenvectors.column(i).into_owned();
    // deterministic sign: first significant component positive
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9) {
        if *first < 0.0 {
            v = -v;
        }
    }
    (val, v)
}

const NORM_TOL: f64 = 1e-9;

/// Maximal variance of a sum of identical-norm local operators and the
/// optimal coefficients.
pub fn max_local_variance<'a>(state: impl Into<StateRef<'a, f64>>) -> Result<LocalVarianceOptimum> {
    let state = state.into();
    let n = state.n_macro() as f64;
    let c = covariance_matrix(state)?.to_f64();
    if c.nrows() == 3 {
        let (val, v) = top_eigen(&c);
        return Ok(LocalVarianceOptimum {
            variance: val,
            coefficients: v.iter().copied().collect(),
            method: VarianceMethod::SingleBlock,
        });
    }
    let w_inv_sqrt = DVector::from_fn(6, |i, _| if i < 3 { 1.0 } else { 1.0 / n.sqrt() });
    let scaled = DMatrix::from_fn(6, 6, |r, col| c[(r, col)] * w_inv_sqrt[r] * w_inv_sqrt[col]);
    let (lambda, v) = top_eigen(&scaled);
    let mut alpha = v.component_mul(&w_inv_sqrt);
    let wnorm: f64 = (0..6).map(|i| alpha[i].powi(2) * if i < 3 { 1.0 } else { n }).sum();
    alpha *= ((n + 1.0) / wnorm).sqrt();
    let micro_norm: f64 = (0..3).map(|i| alpha[i].powi(2)).sum();
    let macro_norm: f64 = (3..6).map(|i| alpha[i].powi(2)).sum();
    if (micro_norm - 1.0).abs() < NORM_TOL && (macro_norm - 1.0).abs() < NORM_TOL {
        return Ok(LocalVarianceOptimum {
            variance: (n + 1.0) * lambda,
            coefficients: alpha.iter().copied().collect(),
            method: VarianceMethod::TightRelaxation,
        });
    }
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let uncorrelated = (0..3).all(|r| (3..6).all(|col| c[(r, col)].abs() <= 1e-12 * scale));
    if uncorrelated {
        let (l_micro, v_micro) = top_eigen(&c.view((0, 0), (3, 3)).into_owned());
        let (l_macro, v_macro) = top_eigen(&c.view((3, 3), (3, 3)).into_owned());
        return Ok(LocalVarianceOptimum {
            variance: l_micro + l_macro,
            coefficients: v_micro.iter().chain(v_macro.iter()).copied().collect(),
            method: VarianceMethod::ProductAdditivity,
        });
    }
    Ok(LocalVarianceOptimum {
        variance: (n + 1.0) * lambda,
        coefficients: alpha.iter().copied().collect(),
        method: VarianceMethod::RelaxationBound,
    })
}

/// Closest fraction with denominator at most `max_den` (continued fractions).
fn rationalize(x: f64, max_den: i64) -> Rational {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let (h2, k2) = (ai.saturating_mul(h1).saturating_add(h0), ai.saturating_mul(k1).saturating_add(k0));
        if k2 > max_den || k2 <= 0 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    Rational::new(h1.into(), k1.into())
}

/// Exact positive-semidefiniteness test by symmetric Gaussian elimination.
pub(crate) fn is_psd_exact(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    for i in 0..n {
        if a[i][i].is_negative() {
            return false;
        }
        if a[i][i].is_zero() {
            if (i + 1..n).any(|j| !a[i][j].is_zero()) {
                return false;
            }
            continue;
        }
        for j in i + 1..n {
            if a[j][i].is_zero() {
                continue;
            }
            let f = a[j][i].clone() / a[i][i].clone();
            for l in i..n {
                let delta = f.clone() * a[i][l].clone();
                a[j][l] = a[j][l].clone() - delta;
            }
        }
    }
    true
}

/// Maximal local variance in exact arithmetic with a certificate:
/// the returned coefficients attain the value, and `lambda W - C` (per block
/// where applicable) is verified positive semidefinite, so nothing does better.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactVarianceCertificate {
    pub variance: Rational,
    pub coefficients: Vec<Rational>,
    pub method: VarianceMethod,
}

fn block(c: &CovarianceMatrix<Rational>, lo: usize, hi: usize) -> Vec<Vec<Rational>> {
    (lo..hi).map(|r| (lo..hi).map(|col| c.get(r, col).clone()).collect()).collect()
}

/// Certifies `lambda` as the top eigenvalue of the symmetric block `m` with weights `w`.
fn certify_block(m: &[Vec<Rational>], weights: &[Rational], alpha: &[Rational]) -> Option<Rational> {
    let num = (0..m.len()).fold(Rational::zero(), |acc, r| {
        (0..m.len()).fold(acc, |acc, col| acc + alpha[r].clone() * m[r][col].clone() * alpha[col].clone())
    });
    let den = (0..m.len()).fold(Rational::zero(), |acc, r| acc + weights[r].clone() * alpha[r].clone() * alpha[r].clone());
    if den.is_zero() {
        return None;
    }
    let lambda = num / den;
    let shifted: Vec<Vec<Rational>> = (0..m.len())
        .map(|r| {
            (0..m.len())
                .map(|col| {
                    let w = if r == col { lambda.clone() * weights[r].clone() } else { Rational::zero() };
                    w - m[r][col].clone()
                })
                .collect()
        })
        .collect();
    is_psd_exact(&shifted).then_some(lambda)
}

fn rational_vector(v: &[f64]) -> Vec<Rational> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v.iter()
        .map(|&x| {
            if x.abs() < 1e-9 * scale {
                Rational::zero()
            } else {
                rationalize(x / scale, 1_000_000)
            }
        })
        .collect()
}

fn norm_sq(v: &[Rational]) -> Rational {
    v.iter().fold(Rational::zero(), |acc, x| acc + x.clone() * x.clone())
}

pub fn certify_max_local_variance<'a>(
    state: impl Into<StateRef<'a, Rational>>,
) -> Result<ExactVarianceCertificate> {
    let state = state.into();
    let n = Rational::from_integer(state.n_macro().into());
    let c = covariance_matrix(state)?;
    let float_state_opt = match state {
        StateRef::MicroMacro(s) => max_local_variance(&s.to_f64())?,
        StateRef::Symmetric(s) => max_local_variance(&s.to_f64())?,
    };
    let fail = |what: &str| Error::NumericalHealth(format!("exact variance certificate failed: {what}"));
    let one = Rational::from_integer(1.into());
    match float_state_opt.method {
        VarianceMethod::SingleBlock => {
            let alpha = rational_vector(&float_state_opt.coefficients);
            let m = block(&c, 0, 3);
            let lambda = certify_block(&m, &vec![one; 3], &alpha).ok_or_else(|| fail("macro block"))?;
            Ok(ExactVarianceCertificate {
                variance: lambda,
                coefficients: alpha,
                method: VarianceMethod::SingleBlock,
            })
        }
        VarianceMethod::TightRelaxation => {
            let alpha = rational_vector(&float_state_opt.coefficients);
            let (micro, macro_) = (norm_sq(&alpha[..3]), norm_sq(&alpha[3..]));
            if micro.is_zero() || micro != macro_ {
                return Err(fail("per-qubit norms differ after rationalisation"));
            }
            let weights: Vec<Rational> = (0..6).map(|i| if i < 3 { one.clone() } else { n.clone() }).collect();
            let m = block(&c, 0, 6);
            let lambda = certify_block(&m, &weights, &alpha).ok_or_else(|| fail("weighted problem"))?;
            Ok(ExactVarianceCertificate {
                variance: (n + one) * lambda,
                coefficients: alpha,
                method: VarianceMethod::TightRelaxation,
            })
        }
        VarianceMethod::ProductAdditivity => {
            let cross_zero = (0..3).all(|r| (3..6).all(|col| c.get(r, col).is_zero()));
            if !cross_zero {
                return Err(fail("state is not a product"));
            }
            let a_micro = rational_vector(&float_state_opt.coefficients[..3]);
            let a_macro = rational_vector(&float_state_opt.coefficients[3..]);
            let ones = vec![one.clone(); 3];
            let l_micro = certify_block(&block(&c, 0, 3), &ones, &a_micro).ok_or_else(|| fail("micro block"))?;
            let l_macro = certify_block(&block(&c, 3, 6), &ones, &a_macro).ok_or_else(|| fail("macro block"))?;
            Ok(ExactVarianceCertificate {
                variance: l_micro + l_macro,
                coefficients: a_micro.into_iter().chain(a_macro).collect(),
                method: VarianceMethod::ProductAdditivity,
            })
        }
        VarianceMethod::RelaxationBound => Err(fail("relaxation is not tight for this state")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{cloner_state, micro_macro_branch, micro_macro_state, Branch, Sign};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn micro_macro_covariance_entries() {
        for n in [1i64, 3, 5, 9, 21] {
            let s = micro_macro_state::<Rational>(n as usize).unwrap();
            let c = covariance_matrix(&s).unwrap();
            assert!(c.is_symmetric());
            assert_eq!(c.get(0, 3), &q(-(n + 1), 2), "N={n}");
            assert_eq!(c.get(1, 4), &q(-(n + 1), 2), "N={n}");
            assert_eq!(c.get(3, 3), &q(n * n + 2 * n - 1, 2));
            assert_eq!(c.get(0, 0), &q(1, 1));
        }
    }

    #[test]
    fn register_covariance_diagonal() {
        for n in [3i64, 5, 7, 31] {
            let s = cloner_state::<Rational>(n as usize, Sign::Minus).unwrap();
            let c = covariance_matrix(&s).unwrap();
            assert_eq!(c.dim(), 3);
            assert_eq!(c.get(0, 0), &q(n * n + 2 * n - 3, 4));
            assert_eq!(c.get(1, 1), &q(n * n + 2 * n - 1, 2));
            assert_eq!(c.get(2, 2), &q(1, 1));
        }
    }

    #[test]
    fn closed_form_maxima_small_n() {
        let psi = max_local_variance(&micro_macro_state::<f64>(3).unwrap()).unwrap();
        assert_eq!(psi.method, VarianceMethod::TightRelaxation);
        assert!((psi.variance - 12.0).abs() < 1e-12);
        let phi0 = max_local_variance(&micro_macro_branch::<f64>(3, Branch::Zero).unwrap()).unwrap();
        assert_eq!(phi0.method, VarianceMethod::ProductAdditivity);
        assert!((phi0.variance - 8.0).abs() < 1e-12);
    }

    #[test]
    fn exact_certificates() {
        for n in [1i64, 3, 7, 15] {
            let psi = certify_max_local_variance(&micro_macro_state::<Rational>(n as usize).unwrap()).unwrap();
            assert_eq!(psi.variance, q((n + 1) * (n + 1), 2) + q(n + 1, 1));
            let phi0 = certify_max_local_variance(&micro_macro_branch::<Rational>(n as usize, Branch::Zero).unwrap()).unwrap();
            assert_eq!(phi0.variance, q((n + 1) * (n + 1), 2));
        }
    }

    #[test]
    fn psd_test() {
        let m = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(2, 1)]];
        assert!(is_psd_exact(&m));
        let m = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(1, 1)]];
        assert!(!is_psd_exact(&m));
        let m = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        assert!(!is_psd_exact(&m));
        let m = vec![vec![q(0, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        assert!(is_psd_exact(&m));
    }

    #[test]
    fn continued_fraction_rationalisation() {
        assert_eq!(rationalize(0.6, 1000), q(3, 5));
        assert_eq!(rationalize(-1.0, 1000), q(-1, 1));
        assert_eq!(rationalize(1.0 / 3.0, 1000), q(1, 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn z_rotation_of_optimal_operator_keeps_variance(half in 0usize..20, theta in 0.0f64..std::f64::consts::TAU) {
            let n = 2 * half + 1;
            let s = micro_macro_state::<f64>(n).unwrap();
            let c = covariance_matrix(&s).unwrap();
            let opt = max_local_variance(&s).unwrap();
            let a = &opt.coefficients;
            let (cs, sn) = (theta.cos(), theta.sin());
            let rot = vec![
                cs * a[0] - sn * a[1], sn * a[0] + cs * a[1], a[2],
                cs * a[3] - sn * a[4], sn * a[3] + cs * a[4], a[5],
            ];
            let v = c.quadratic_form(&rot);
            prop_assert!((v - opt.variance).abs() <= 1e-10 * opt.variance);
        }
    }
}
