//! Binomial coefficients in three flavours: exact big integers, log-space
//! floats for large `n`, and Pascal tables in any [`Scalar`].
//!
//! `C(N, N/2)` leaves the 64-bit range near `N = 67`, so anything that may see
//! large `N` goes through either the big-integer or the log-space path.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Exact `C(n, k)`; zero when `k > n`.
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// Signed-argument binomial used by alternating sums: zero outside `0 <= k <= n`.
pub(crate) fn binomial_signed(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    BigInt::from(binomial_exact(n as u64, k as u64))
}

/// `ln C(n, k)` through the log-gamma function.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return domain(format!("log_binomial: k = {k} exceeds n = {n}"));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    let (n, k) = (n as f64, k as f64);
    Ok(ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0))
}

/// `ln C(n, k)` from the exact integer; the reference path for `n <= 64`.
pub fn log_binomial_exact(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return domain(format!("log_binomial_exact: k = {k} exceeds n = {n}"));
    }
    Ok(ln_biguint(&binomial_exact(n, k)))
}

/// Natural log of a big unsigned integer, keeping 64 significant bits.
pub(crate) fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return (v.iter_u64_digits().next().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Krawtchouk sum `Σ_i (-1)^i C(k, i) C(n-k, x-i)`.
///
/// Up to normalisation this is the overlap of the Dicke state `|n, x>` with the
/// Hadamard-rotated Dicke state `|n, k>_x`. The terms alternate, so it is
/// evaluated exactly.
pub fn krawtchouk(n: u64, k: u64, x: u64) -> BigInt {
    let (n, k, x) = (n as i64, k as i64, x as i64);
    let mut acc = BigInt::zero();
    for i in 0..=k.min(x) {
        let term = binomial_signed(k, i) * binomial_signed(n - k, x - i);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `krawtchouk(n, k, x)` for every `k` in `0..=n`.
///
/// Coefficient `x` of `(1 - z)^k (1 + z)^(n - k)`, stepping `k` by an exact
/// division by `1 + z` followed by a multiplication by `1 - z`.
pub fn krawtchouk_row(n: u64, x: u64) -> Vec<BigInt> {
    let n = n as usize;
    let mut poly: Vec<BigInt> = (0..=n as u64).map(|j| BigInt::from(binomial_exact(n as u64, j))).collect();
    let mut row = Vec::with_capacity(n + 1);
    for k in 0..=n {
        row.push(poly.get(x as usize).cloned().unwrap_or_else(BigInt::zero));
        if k == n {
            break;
        }
        let mut q = poly.clone();
        for j in 1..=n {
            q[j] = &poly[j] - &q[j - 1];
        }
        for j in (1..=n).rev() {
            poly[j] = &q[j] - &q[j - 1];
        }
        poly[0] = q[0].clone();
    }
    row
}

/// Pascal triangle up to row `n`, built by additions only.
#[derive(Debug, Clone)]
pub struct BinomialTable<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> BinomialTable<S> {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(n + 1);
        rows.push(vec![S::one()]);
        for r in 1..=n {
            let prev = &rows[r - 1];
            let mut row = Vec::with_capacity(r + 1);
            row.push(S::one());
            for k in 1..r {
                row.push(prev[k - 1].clone() + prev[k].clone());
            }
            row.push(S::one());
            rows.push(row);
        }
        Self { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k)`, zero for any out-of-range argument.
    pub fn get(&self, n: i64, k: i64) -> S {
        if n < 0 || k < 0 || k > n || n as usize > self.max_n() {
            return S::zero();
        }
        self.rows[n as usize][k as usize].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    /// ln n! from the Stirling series, independent of the log-gamma path.
    fn stirling_ln_factorial(n: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        n * n.ln() - n + 0.5 * (tau * n).ln() + 1.0 / (12.0 * n) - 1.0 / (360.0 * n.powi(3))
            + 1.0 / (1260.0 * n.powi(5))
    }

    #[test]
    fn small_binomials() {
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-14);
        assert_eq!(log_binomial(17, 0).unwrap(), 0.0);
        assert_eq!(log_binomial(17, 17).unwrap(), 0.0);
        assert_eq!(binomial_exact(4, 2), BigUint::from(6u32));
        assert_eq!(binomial_exact(3, 5), BigUint::zero());
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(log_binomial(3, 4).is_err());
        assert!(log_binomial_exact(3, 4).is_err());
    }

    #[test]
    fn large_binomial_matches_stirling() {
        let expected = stirling_ln_factorial(10000.0) - 2.0 * stirling_ln_factorial(5000.0);
        let got = log_binomial(10000, 5000).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn log_gamma_path_agrees_with_exact_up_to_64() {
        for n in 0..=64u64 {
            for k in 0..=n {
                let a = log_binomial(n, k).unwrap();
                let b = log_binomial_exact(n, k).unwrap();
                let scale = b.abs().max(1.0);
                assert!((a - b).abs() / scale < 1e-12, "n={n} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn krawtchouk_row_matches_sum() {
        for n in 0..=12u64 {
            for x in 0..=n {
                let row = krawtchouk_row(n, x);
                for k in 0..=n {
                    assert_eq!(row[k as usize], krawtchouk(n, k, x), "n={n} k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn krawtchouk_small_values() {
        // sum_i (-1)^i C(k, i) C(3 - k, 1 - i) by hand: 3, 2 - 1, 1 - 2, -3
        let vals: Vec<i64> = (0..=3)
            .map(|k| i64::try_from(krawtchouk(3, k, 1)).unwrap())
            .collect();
        assert_eq!(vals, vec![3, 1, -1, -3]);
    }

    #[test]
    fn pascal_table_matches_exact() {
        let t = BinomialTable::<BigRational>::new(40);
        for n in 0..=40i64 {
            for k in 0..=n {
                let exact = BigRational::from_integer(BigInt::from(binomial_exact(n as u64, k as u64)));
                assert_eq!(t.get(n, k), exact);
            }
        }
        assert_eq!(t.get(5, 7), BigRational::zero());
        assert_eq!(t.get(5, -1), BigRational::zero());
    }
}
