use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::gates::{hadamard, pauli, Gate};
use super::{check_density_capacity, check_state_capacity, qubit_mask};
use crate::error::{domain, Result};
use crate::symcore::{Axis, Basis, DickeBasisLabel, MicroMacroState, SymmetricPureState};

/// Dense state vector of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStateVector {
    pub n_qubits: usize,
    pub amplitudes: DVector<Complex64>,
}

impl FullStateVector {
    /// Normalises `amplitudes`, which must have length `2^n`.
    pub fn new(n_qubits: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        check_state_capacity(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return domain(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_qubits
            ));
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return domain("zero vector is not a state");
        }
        Ok(Self {
            n_qubits,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Applies a single-qubit operator to qubit `q` in place.
    pub fn apply_gate(&mut self, q: usize, g: &Gate) {
        let mask = qubit_mask(self.n_qubits, q);
        for a in 0..self.dim() {
            if a & mask != 0 {
                continue;
            }
            let (x0, x1) = (self.amplitudes[a], self.amplitudes[a | mask]);
            self.amplitudes[a] = g[0][0] * x0 + g[0][1] * x1;
            self.amplitudes[a | mask] = g[1][0] * x0 + g[1][1] * x1;
        }
    }

    pub fn apply_to_all(&mut self, g: &Gate) {
        for q in 0..self.n_qubits {
            self.apply_gate(q, g);
        }
    }

    pub fn apply_operator(&self, op: &DMatrix<Complex64>) -> DVector<Complex64> {
        op * &self.amplitudes
    }

    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }

    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Probability of each Hamming weight of the computational basis index.
    pub fn weight_probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.n_qubits + 1];
        for (s, a) in self.amplitudes.iter().enumerate() {
            p[s.count_ones() as usize] += a.norm_sqr();
        }
        p
    }

    /// `Tr_rest |psi><psi|` keeping the listed qubits (in the listed order).
    pub fn partial_trace(&self, kept: &[usize]) -> Result<super::FullDensityMatrix> {
        let n = self.n_qubits;
        let (kept_masks, traced_masks) = split_masks(n, kept)?;
        check_density_capacity(kept.len())?;
        let dk = 1 << kept.len();
        let dt = 1 << traced_masks.len();
        let mut out = DMatrix::<Complex64>::zeros(dk, dk);
        for t in 0..dt {
            let base = compose(t, &traced_masks);
            let col: Vec<Complex64> = (0..dk)
                .map(|a| self.amplitudes[base | compose(a, &kept_masks)])
                .collect();
            for a in 0..dk {
                if col[a] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..dk {
                    out[(a, b)] += col[a] * col[b].conj();
                }
            }
        }
        super::FullDensityMatrix::new(kept.len(), out)
    }
}

/// Full-index masks of the kept qubits (most significant first) and of the rest.
pub(crate) fn split_masks(n: usize, kept: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut seen = vec![false; n];
    for &q in kept {
        if q >= n || seen[q] {
            return domain(format!("invalid kept qubit list {kept:?} for {n} qubits"));
        }
        seen[q] = true;
    }
    let kept_masks = kept.iter().map(|&q| qubit_mask(n, q)).collect();
    let traced_masks = (0..n).filter(|&q| !seen[q]).map(|q| qubit_mask(n, q)).collect();
    Ok((kept_masks, traced_masks))
}

/// Scatters the bits of a local index (most significant first) onto `masks`.
pub(crate) fn compose(local: usize, masks: &[usize]) -> usize {
    let m = masks.len();
    masks
        .iter()
        .enumerate()
        .filter(|(i, _)| local >> (m - 1 - i) & 1 == 1)
        .fold(0, |acc, (_, &mask)| acc | mask)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Equal superposition of all `C(n, k)` basis states of weight `k`, then
/// Hadamard-rotated when the label asks for the X basis.
pub fn embed_dicke(label: DickeBasisLabel) -> Result<FullStateVector> {
    let n = label.n_qubits;
    check_state_capacity(n)?;
    let amp = Complex64::new(1.0 / binomial_f64(n, label.excitations).sqrt(), 0.0);
    let v = DVector::from_fn(1 << n, |s, _| {
        if s.count_ones() as usize == label.excitations {
            amp
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut psi = FullStateVector {
        n_qubits: n,
        amplitudes: v,
    };
    if label.basis == Basis::X {
        psi.apply_to_all(&hadamard());
    }
    Ok(psi)
}

pub fn embed_symmetric(state: &SymmetricPureState<f64>) -> Result<FullStateVector> {
    let n = state.n_qubits();
    check_state_capacity(n)?;
    let amps = state.amplitudes()?;
    let norms: Vec<f64> = (0..=n).map(|k| binomial_f64(n, k).sqrt()).collect();
    let v = DVector::from_fn(1 << n, |s, _| {
        let k = s.count_ones() as usize;
        amps[k] / norms[k]
    });
    let mut psi = FullStateVector {
        n_qubits: n,
        amplitudes: v,
    };
    if state.basis() == Basis::X {
        psi.apply_to_all(&hadamard());
    }
    Ok(psi)
}

/// Micro qubit (qubit 0) in `|+->`, macro register on qubits `1..=N`.
pub fn embed_micro_macro(state: &MicroMacroState<f64>) -> Result<FullStateVector> {
    let n = state.n_macro();
    check_state_capacity(n + 1)?;
    let plus = embed_symmetric(state.macro_plus())?;
    let minus = embed_symmetric(state.macro_minus())?;
    let mu = state.micro_coefficients();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let dm = 1 << n;
    let v = DVector::from_fn(2 * dm, |s, _| {
        let rest = s & (dm - 1);
        let sign = if s >= dm { -1.0 } else { 1.0 };
        (mu[0] * plus.amplitudes[rest] + mu[1] * minus.amplitudes[rest] * sign) * h
    });
    FullStateVector::new(n + 1, v)
}

/// `g` acting on qubit `q` of an `n`-qubit register, as a dense matrix.
pub fn single_site_operator(n: usize, q: usize, g: &Gate) -> Result<DMatrix<Complex64>> {
    check_density_capacity(n)?;
    if q >= n {
        return domain(format!("qubit {q} out of range for {n} qubits"));
    }
    let mask = qubit_mask(n, q);
    let d = 1 << n;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for a in 0..d {
        let ra = usize::from(a & mask != 0);
        for rb in 0..2 {
            let b = if rb == 1 { a | mask } else { a & !mask };
            m[(a, b)] += g[ra][rb];
        }
    }
    Ok(m)
}

/// `sum_q sigma_axis^(q)` over the listed qubits of an `n`-qubit register.
pub fn collective_operator(n: usize, qubits: &[usize], axis: Axis) -> Result<DMatrix<Complex64>> {
    let d = 1 << n;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for &q in qubits {
        m += single_site_operator(n, q, &pauli(axis))?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_single_excitation() {
        let psi = embed_dicke(DickeBasisLabel::new(2, 1, Basis::Z).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [0.0, h, h, 0.0];
        for (a, w) in psi.amplitudes.iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
        let three = embed_dicke(DickeBasisLabel::new(3, 1, Basis::Z).unwrap()).unwrap();
        assert!((three.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            embed_dicke(DickeBasisLabel::new(13, 1, Basis::Z).unwrap()),
            Err(crate::Error::Capacity { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_state() {
        // |0> (x) |+>: keep qubit 1 only
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let psi = FullStateVector::new(2, v).unwrap();
        let r = psi.partial_trace(&[1]).unwrap();
        for z in r.matrix.iter() {
            assert!((z.re - 0.5).abs() < 1e-15);
        }
        let r0 = psi.partial_trace(&[0]).unwrap();
        assert!((r0.matrix[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(psi.partial_trace(&[0, 0]).is_err());
    }
}
