//! Collective spin operators acting on Dicke coefficients.
//!
//! Matrix elements of products of `M_x`, `M_y`, `M_z` are expanded path by
//! path: every path through the ladder carries a Gaussian-integer prefactor
//! and an integer radicand (a product of ladder factors `(k + 1)(N - k)`).
//! Paths with the same endpoints and radicand are merged before any square
//! root is taken, so in exact arithmetic only radicands that survive
//! cancellation must be perfect squares.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use super::basis::{Axis, Basis};
use super::state::{MicroMacroState, SymmetricPureState};
use crate::error::{domain, Error, Result};
use crate::scalar::{sqrt_of_int, Scalar};

/// `w * M_axis`, i.e. the same single-site Pauli with weight `w` on every qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveObservable<S> {
    pub axis: Axis,
    pub weight: S,
}

impl<S: Scalar> CollectiveObservable<S> {
    pub fn new(axis: Axis) -> Self {
        Self {
            axis,
            weight: S::one(),
        }
    }

    pub fn with_weight(axis: Axis, weight: S) -> Self {
        Self { axis, weight }
    }
}

type Path = (usize, Complex<i128>, u128);

/// One application of `M_axis` to `|N, k>` expressed in `basis`.
///
/// In the X basis the Hadamard conjugation swaps the roles of `M_x` and
/// `M_z` and flips the sign of `M_y`.
fn ladder(n: usize, basis: Basis, axis: Axis, k: usize) -> Vec<Path> {
    let raise = (k < n).then(|| (k + 1, ((k + 1) * (n - k)) as u128));
    let lower = (k > 0).then(|| (k - 1, (k * (n - k + 1)) as u128));
    let diag = || vec![(k, Complex::new(n as i128 - 2 * k as i128, 0), 1u128)];
    let off = |up: Complex<i128>, down: Complex<i128>| {
        let mut v = Vec::with_capacity(2);
        if let Some((t, r)) = raise {
            v.push((t, up, r));
        }
        if let Some((t, r)) = lower {
            v.push((t, down, r));
        }
        v
    };
    let one = Complex::new(1, 0);
    let i = Complex::new(0, 1);
    match (basis, axis) {
        (Basis::Z, Axis::Z) | (Basis::X, Axis::X) => diag(),
        (Basis::Z, Axis::X) | (Basis::X, Axis::Z) => off(one, one),
        (Basis::Z, Axis::Y) => off(i, -i),
        (Basis::X, Axis::Y) => off(-i, i),
    }
}

fn word_paths(n: usize, basis: Basis, word: &[Axis], start: usize) -> Result<Vec<Path>> {
    let mut paths: Vec<Path> = vec![(start, Complex::new(1, 0), 1)];
    // operators act right to left
    for &axis in word.iter().rev() {
        let mut next = Vec::with_capacity(paths.len() * 2);
        for (k, f, r) in paths {
            for (t, g, s) in ladder(n, basis, axis, k) {
                let rad = r
                    .checked_mul(s)
                    .ok_or_else(|| Error::Domain(format!("radicand overflow at N = {n}")))?;
                next.push((t, f * g, rad));
            }
        }
        paths = next;
    }
    Ok(paths)
}

fn complex_from_i128<S: Scalar>(v: Complex<i128>) -> Complex<S> {
    Complex::new(
        S::from_i128(v.re).expect("integer prefactor fits the scalar"),
        S::from_i128(v.im).expect("integer prefactor fits the scalar"),
    )
}

/// Unnormalised `sum_{a,b} conj(l_a) <a|W|b> r_b` without weights.
fn raw_element<S: Scalar>(
    left: &SymmetricPureState<S>,
    word: &[Axis],
    right: &SymmetricPureState<S>,
) -> Result<Complex<S>> {
    let n = right.n_qubits();
    let lc = left.coefficients();
    let mut merged: BTreeMap<(usize, usize, u128), Complex<i128>> = BTreeMap::new();
    for b in right.support() {
        for (a, f, rad) in word_paths(n, right.basis(), word, b)? {
            if lc[a].is_zero() {
                continue;
            }
            *merged.entry((a, b, rad)).or_insert_with(Complex::zero) += f;
        }
    }
    let rc = right.coefficients();
    let mut acc = Complex::<S>::zero();
    for ((a, b, rad), f) in merged {
        if f.is_zero() {
            continue;
        }
        let root: S = sqrt_of_int(rad).ok_or_else(|| Error::InexactSqrt(rad.to_string()))?;
        let term = lc[a].conj() * rc[b].clone() * complex_from_i128::<S>(f);
        acc = acc + Complex::new(term.re * root.clone(), term.im * root);
    }
    Ok(acc)
}

/// `<left| O_1 O_2 ... O_m |right>` for normalised states.
pub fn matrix_element<S: Scalar>(
    left: &SymmetricPureState<S>,
    word: &[CollectiveObservable<S>],
    right: &SymmetricPureState<S>,
) -> Result<Complex<S>> {
    left.check_compatible(right)?;
    let axes: Vec<Axis> = word.iter().map(|o| o.axis).collect();
    let raw = raw_element(left, &axes, right)?;
    let weight = word.iter().fold(S::one(), |w, o| w * o.weight.clone());
    let norm = (left.norm_sq().clone() * right.norm_sq().clone())
        .try_sqrt()
        .ok_or_else(|| Error::InexactSqrt("product of state norms".into()))?;
    let scale = weight / norm;
    Ok(Complex::new(raw.re * scale.clone(), raw.im * scale))
}

/// Exact `(<O>, <O^2> - <O>^2)` of a collective observable.
pub fn expectation_and_variance<S: Scalar>(
    state: &SymmetricPureState<S>,
    observable: &CollectiveObservable<S>,
) -> Result<(S, S)> {
    let first = matrix_element(state, std::slice::from_ref(observable), state)?;
    let second = matrix_element(state, &[observable.clone(), observable.clone()], state)?;
    let mean = first.re;
    Ok((mean.clone(), second.re - mean.clone() * mean))
}

/// Single-qubit operator on the micro qubit, written in the `(|+>, |->)` basis
/// with Gaussian-integer entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MicroOperator(pub [[Complex<i64>; 2]; 2]);

impl MicroOperator {
    pub fn identity() -> Self {
        let (o, z) = (Complex::new(1, 0), Complex::new(0, 0));
        Self([[o, z], [z, o]])
    }

    /// `sigma_x = diag(1, -1)`, `sigma_z` swaps `|+>` and `|->`, and
    /// `sigma_y|+> = -i|->`, `sigma_y|-> = i|+>`.
    pub fn pauli(axis: Axis) -> Self {
        let (o, z, i) = (Complex::new(1, 0), Complex::new(0, 0), Complex::new(0, 1));
        match axis {
            Axis::X => Self([[o, z], [z, -o]]),
            Axis::Y => Self([[z, i], [-i, z]]),
            Axis::Z => Self([[z, o], [o, z]]),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [[Complex::new(0, 0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.0[r][0] * other.0[0][c] + self.0[r][1] * other.0[1][c];
            }
        }
        Self(out)
    }
}

/// `<left| m (x) O_1 ... O_k |right>` for micro-macro states.
pub fn micro_macro_expectation<S: Scalar>(
    left: &MicroMacroState<S>,
    micro: &MicroOperator,
    word: &[CollectiveObservable<S>],
    right: &MicroMacroState<S>,
) -> Result<Complex<S>> {
    if left.n_macro() != right.n_macro() {
        return domain("micro-macro states on different registers");
    }
    let lm = left.micro_coefficients();
    let rm = right.micro_coefficients();
    let mut acc = Complex::<S>::zero();
    for s in 0..2 {
        if lm[s].is_zero() {
            continue;
        }
        for sp in 0..2 {
            let m = micro.0[s][sp];
            if rm[sp].is_zero() || (m.re == 0 && m.im == 0) {
                continue;
            }
            let macro_part = matrix_element(left.macro_component(s), word, right.macro_component(sp))?;
            let m = Complex::new(S::from_int(m.re), S::from_int(m.im));
            acc = acc + lm[s].conj() * m * rm[sp].clone() * macro_part;
        }
    }
    let norm = (left.micro_norm_sq().clone() * right.micro_norm_sq().clone())
        .try_sqrt()
        .ok_or_else(|| Error::InexactSqrt("product of micro norms".into()))?;
    Ok(Complex::new(acc.re / norm.clone(), acc.im / norm))
}
