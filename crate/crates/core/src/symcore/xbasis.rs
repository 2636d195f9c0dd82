//! Change between the Z and X (Hadamard-rotated) Dicke bases.
//!
//! `<N, j|H^{(x)N}|N, k> = sqrt(C(N, k) / (2^N C(N, j))) K(N, k, j)` with `K` the
//! Krawtchouk sum. The squared overlaps are rational, so amplitudes are formed
//! from exact integers and only the final square root is rounded.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Signed, Zero};

use super::basis::{Basis, Sign};
use super::state::SymmetricPureState;
use crate::combinatorics::{binomial_exact, krawtchouk, krawtchouk_row};
use crate::error::{domain, require_odd, Result};
use crate::scalar::{Real, Scalar};

fn pow2(n: usize) -> BigInt {
    BigInt::from(1) << n
}

/// Signed Hadamard overlap `<N, j|H^{(x)N}|N, k>` as `f64`.
pub(crate) fn hadamard_overlap(n: usize, j: usize, k: usize) -> f64 {
    let kr = krawtchouk(n as u64, k as u64, j as u64);
    if kr.is_zero() {
        return 0.0;
    }
    let num = BigInt::from(binomial_exact(n as u64, k as u64)) * &kr * &kr;
    let den = pow2(n) * BigInt::from(binomial_exact(n as u64, j as u64));
    let mag = f64::from_ratio(&num, &den).sqrt();
    if kr.is_negative() {
        -mag
    } else {
        mag
    }
}

/// All overlaps `<N, j|H^{(x)N}|N, k>` as a matrix indexed `(j, k)`, cached per `N`.
pub(crate) fn hadamard_overlap_matrix(n: usize) -> Arc<DMatrix<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DMatrix<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.lock().expect("overlap cache poisoned").get(&n) {
        return Arc::clone(m);
    }
    let binom: Vec<BigInt> = (0..=n as u64).map(|k| BigInt::from(binomial_exact(n as u64, k))).collect();
    let scale = pow2(n);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        let den = &scale * &binom[j];
        for (k, kr) in krawtchouk_row(n as u64, j as u64).iter().enumerate() {
            let mag = f64::from_ratio(&(&binom[k] * kr * kr), &den).sqrt();
            m[(j, k)] = if kr.is_negative() { -mag } else { mag };
        }
    }
    let m = Arc::new(m);
    cache.lock().expect("overlap cache poisoned").insert(n, Arc::clone(&m));
    m
}

/// Squared expansion weights `beta_k^2` of the cloner branches in the X basis:
/// `beta_k^2 = K(N, k, (N-1)/2)^2 / (2^N C(N, (N-1)/2))`.
pub fn x_basis_coefficients_squared<S: Scalar>(n_qubits: usize) -> Result<Vec<S>> {
    require_odd(n_qubits)?;
    let k0 = ((n_qubits - 1) / 2) as u64;
    let den = pow2(n_qubits) * BigInt::from(binomial_exact(n_qubits as u64, k0));
    Ok(krawtchouk_row(n_qubits as u64, k0)
        .iter()
        .map(|kr| S::from_ratio(&(kr * kr), &den))
        .collect())
}

/// Signed `beta_k`, so that
/// `|psi+-> = sum_k (1 +- (-1)^k)/sqrt(2) sqrt(C(N, k)) beta_k |N, k>_x`.
pub fn x_basis_coefficients(n_qubits: usize) -> Result<Vec<f64>> {
    require_odd(n_qubits)?;
    let k0 = ((n_qubits - 1) / 2) as u64;
    let sq = x_basis_coefficients_squared::<f64>(n_qubits)?;
    let signs = krawtchouk_row(n_qubits as u64, k0);
    Ok(sq
        .into_iter()
        .zip(&signs)
        .map(|(b2, sign)| {
            if sign.is_negative() {
                -b2.sqrt()
            } else {
                b2.sqrt()
            }
        })
        .collect())
}

/// X-basis outcome distribution of `|psi+->`: `2 C(N, k) beta_k^2` on even
/// (`+`) or odd (`-`) `k`, zero otherwise. Exact in rational arithmetic.
pub fn cloner_x_probabilities<S: Scalar>(n_qubits: usize, sign: Sign) -> Result<Vec<S>> {
    let beta_sq = x_basis_coefficients_squared::<S>(n_qubits)?;
    let parity = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    Ok(beta_sq
        .into_iter()
        .enumerate()
        .map(|(k, b2)| {
            if k % 2 == parity {
                let c = S::from_bigint(&BigInt::from(binomial_exact(n_qubits as u64, k as u64)));
                S::from_int(2) * c * b2
            } else {
                S::zero()
            }
        })
        .collect())
}

fn hadamard_image<S: Real>(state: &SymmetricPureState<S>, target: Basis) -> Result<SymmetricPureState<S>> {
    let n = state.n_qubits();
    let amps = state.amplitudes()?;
    let h = hadamard_overlap_matrix(n);
    let overlaps: Vec<Vec<S>> = (0..=n)
        .map(|j| (0..=n).map(|k| S::from_f64(h[(j, k)]).expect("finite overlap")).collect())
        .collect();
    let coeffs = (0..=n)
        .map(|j| {
            amps.iter()
                .zip(&overlaps[j])
                .fold(Complex::<S>::zero(), |acc, (a, o)| acc + a * *o)
        })
        .collect();
    SymmetricPureState::from_coefficients(n, target, coeffs)
}

/// Re-expresses a Z-basis state in the X basis.
pub fn to_x_basis<S: Real>(state: &SymmetricPureState<S>) -> Result<SymmetricPureState<S>> {
    if state.basis() != Basis::Z {
        return domain("to_x_basis expects a Z-basis state");
    }
    hadamard_image(state, Basis::X)
}

/// Re-expresses an X-basis state in the Z basis.
pub fn to_z_basis<S: Real>(state: &SymmetricPureState<S>) -> Result<SymmetricPureState<S>> {
    if state.basis() != Basis::X {
        return domain("to_z_basis expects an X-basis state");
    }
    hadamard_image(state, Basis::Z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::cloner_state;
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn single_qubit_plus_lives_on_even_x_levels() {
        let p = cloner_x_probabilities::<f64>(1, Sign::Plus).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn normalisation_is_exact() {
        for n in [1usize, 3, 5, 7, 21, 63] {
            for sign in [Sign::Plus, Sign::Minus] {
                let p = cloner_x_probabilities::<Rational>(n, sign).unwrap();
                let total = p.iter().fold(Rational::zero(), |a, b| a + b);
                assert!(total.is_one(), "N={n} {sign:?}: {total}");
            }
        }
    }

    #[test]
    fn expansion_reproduces_transformed_state() {
        let n = 9;
        let beta = x_basis_coefficients(n).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let z = cloner_state::<f64>(n, sign).unwrap();
            let x = to_x_basis(&z).unwrap();
            for (k, c) in x.coefficients().iter().enumerate() {
                let parity = 1.0 + sign.factor() as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
                let binom = crate::combinatorics::binomial_exact(n as u64, k as u64);
                let want = parity / 2f64.sqrt() * f64::from_ratio(&binom.into(), &BigInt::one()).sqrt() * beta[k];
                assert!((c.re - want).abs() < 1e-12 && c.im.abs() < 1e-15, "k={k}");
            }
        }
    }

    #[test]
    fn basis_change_round_trips() {
        let z = cloner_state::<f64>(7, Sign::Plus).unwrap();
        let back = to_z_basis(&to_x_basis(&z).unwrap()).unwrap();
        for (a, b) in back.coefficients().iter().zip(z.normalized().coefficients()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(to_z_basis(&z).is_err());
    }
}
