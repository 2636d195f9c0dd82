use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gates::{adjoint, Gate};
use super::vector::{compose, split_masks};
use super::{check_density_capacity, qubit_mask, FullStateVector};
use crate::error::{domain, Result};

/// Dense density matrix of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct FullDensityMatrix {
    pub n_qubits: usize,
    pub matrix: DMatrix<Complex64>,
}

impl FullDensityMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_density_capacity(n_qubits)?;
        let d = 1 << n_qubits;
        if matrix.nrows() != d || matrix.ncols() != d {
            return domain(format!(
                "{}x{} matrix for {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                n_qubits
            ));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn from_pure(psi: &FullStateVector) -> Result<Self> {
        check_density_capacity(psi.n_qubits)?;
        let v = &psi.amplitudes;
        Self::new(psi.n_qubits, v * v.adjoint())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_density_capacity(n_qubits)?;
        let d = 1 << n_qubits;
        Self::new(
            n_qubits,
            DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        )
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = crate::linalg::hermitian_eigen(&self.matrix);
        vals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Trace one, Hermitian and positive semidefinite within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
            && self.hermiticity_defect() <= tol
            && self.min_eigenvalue() >= -tol
    }

    /// `g rho g^dagger` on qubit `q` (no unitarity assumed).
    pub fn conjugate_gate(&self, q: usize, g: &Gate) -> DMatrix<Complex64> {
        let mask = qubit_mask(self.n_qubits, q);
        let d = self.dim();
        let mut m = self.matrix.clone();
        // rows: m <- g m
        for a in 0..d {
            if a & mask != 0 {
                continue;
            }
            for c in 0..d {
                let (x0, x1) = (m[(a, c)], m[(a | mask, c)]);
                m[(a, c)] = g[0][0] * x0 + g[0][1] * x1;
                m[(a | mask, c)] = g[1][0] * x0 + g[1][1] * x1;
            }
        }
        // columns: m <- m g^dagger
        let gd = adjoint(g);
        for c in 0..d {
            if c & mask != 0 {
                continue;
            }
            for a in 0..d {
                let (y0, y1) = (m[(a, c)], m[(a, c | mask)]);
                m[(a, c)] = y0 * gd[0][0] + y1 * gd[1][0];
                m[(a, c | mask)] = y0 * gd[0][1] + y1 * gd[1][1];
            }
        }
        m
    }

    /// `U^{(x)n} rho U^{dagger (x)n}`.
    pub fn rotate_all(&self, g: &Gate) -> Self {
        let mut out = self.clone();
        for q in 0..self.n_qubits {
            out.matrix = out.conjugate_gate(q, g);
        }
        out
    }

    /// Probability of each Hamming weight of the computational basis index.
    pub fn weight_probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.n_qubits + 1];
        for s in 0..self.dim() {
            p[s.count_ones() as usize] += self.matrix[(s, s)].re;
        }
        p
    }

    /// Outcome probabilities of the collective projectors `U pi_i U^dagger`,
    /// where `pi_i` projects on computational states of Hamming weight `i`.
    pub fn rotated_weight_probabilities(&self, u: &Gate) -> Vec<f64> {
        self.rotate_all(&adjoint(u)).weight_probabilities()
    }

    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        (op * &self.matrix).trace()
    }

    /// Partial trace keeping the listed qubits (in the listed order).
    pub fn partial_trace(&self, kept: &[usize]) -> Result<Self> {
        let (kept_masks, traced_masks) = split_masks(self.n_qubits, kept)?;
        let dk = 1 << kept.len();
        let dt = 1 << traced_masks.len();
        let full: Vec<usize> = (0..dk).map(|a| compose(a, &kept_masks)).collect();
        let mut out = DMatrix::<Complex64>::zeros(dk, dk);
        for t in 0..dt {
            let base = compose(t, &traced_masks);
            for a in 0..dk {
                for b in 0..dk {
                    out[(a, b)] += self.matrix[(base | full[a], base | full[b])];
                }
            }
        }
        Self::new(kept.len(), out)
    }

    /// Matrix of `rho` restricted to the symmetric subspace, in the Dicke
    /// basis `|n, 0>, ..., |n, n>` of the computational basis.
    pub fn symmetric_block(&self) -> DMatrix<Complex64> {
        let n = self.n_qubits;
        let mut out = DMatrix::<Complex64>::zeros(n + 1, n + 1);
        let mut counts = vec![0usize; n + 1];
        for s in 0..self.dim() {
            counts[s.count_ones() as usize] += 1;
        }
        for a in 0..self.dim() {
            let ka = a.count_ones() as usize;
            for b in 0..self.dim() {
                let kb = b.count_ones() as usize;
                out[(ka, kb)] += self.matrix[(a, b)];
            }
        }
        for ka in 0..=n {
            for kb in 0..=n {
                out[(ka, kb)] /= ((counts[ka] * counts[kb]) as f64).sqrt();
            }
        }
        out
    }

    /// Largest entrywise change under any transposition of neighbouring qubits.
    pub fn permutation_defect(&self) -> f64 {
        permutation_defect(&self.matrix, self.n_qubits)
    }
}

pub(crate) fn swap_bits(s: usize, m1: usize, m2: usize) -> usize {
    let b1 = s & m1 != 0;
    let b2 = s & m2 != 0;
    if b1 == b2 {
        s
    } else {
        s ^ m1 ^ m2
    }
}

pub(crate) fn permutation_defect(m: &DMatrix<Complex64>, n: usize) -> f64 {
    let d = m.nrows();
    let mut worst: f64 = 0.0;
    for q in 0..n.saturating_sub(1) {
        let (m1, m2) = (qubit_mask(n, q), qubit_mask(n, q + 1));
        for a in 0..d {
            let pa = swap_bits(a, m1, m2);
            for b in 0..d {
                let pb = swap_bits(b, m1, m2);
                worst = worst.max((m[(pa, pb)] - m[(a, b)]).norm());
            }
        }
    }
    worst
}
