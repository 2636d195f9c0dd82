//! Quantum Fisher information from the symmetric logarithmic derivative.
//!
//! For `rho_theta = exp(-i theta H) rho exp(i theta H)` the derivative is
//! `R = -i[H, rho]`; the SLD `L` solves `(L rho + rho L)/2 = R` and the
//! Fisher information is `Tr(rho L^2) = Tr(L R)`. The Lyapunov equation is
//! solved as a linear system with a pseudo-inverse (relative cutoff `1e-12`),
//! which handles rank-deficient `rho`: any solution gives the same value.
//!
//! Two routes are provided. A dense route vectorises the equation on the full
//! `d^2`-dimensional operator space (`d <= 16`). For permutation-invariant
//! `rho` and `H` the solution is itself permutation invariant, so the equation
//! is restricted to the span of orbit sums of matrix units under simultaneous
//! qubit permutations. An orbit of `(s, s')` is fixed by the number of
//! positions holding `(0,1)`, `(1,0)` and `(1,1)`, giving `C(n+3, 3)` unknowns.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::permutation_defect;
use super::{FullDensityMatrix, FullStateVector};
use crate::error::{domain, Error, Result};

const PINV_CUTOFF: f64 = 1e-12;
const INVARIANCE_TOL: f64 = 1e-12;
const DENSE_MAX_DIM: usize = 16;

/// Which linear system was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SldRoute {
    Dense,
    PermutationOrbits,
}

/// `4 (<H^2> - <H>^2)`.
pub fn pure_state_qfi(psi: &FullStateVector, h: &DMatrix<Complex64>) -> Result<f64> {
    if h.nrows() != psi.dim() || h.ncols() != psi.dim() {
        return domain("generator and state dimensions differ");
    }
    let hpsi = h * &psi.amplitudes;
    let mean = psi.amplitudes.dotc(&hpsi).re;
    let second = hpsi.dotc(&hpsi).re;
    Ok(4.0 * (second - mean * mean))
}

/// SLD quantum Fisher information of `rho` for the generator `h`.
pub fn sld_quantum_fisher(rho: &FullDensityMatrix, h: &DMatrix<Complex64>) -> Result<(f64, SldRoute)> {
    let d = rho.dim();
    if h.nrows() != d || h.ncols() != d {
        return domain("generator and state dimensions differ");
    }
    let scale = rho.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let hscale = h.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
    let invariant = permutation_defect(&rho.matrix, rho.n_qubits) <= INVARIANCE_TOL * scale.max(1.0)
        && permutation_defect(h, rho.n_qubits) <= INVARIANCE_TOL * hscale;
    if invariant {
        Ok((orbit_route(rho, h)?, SldRoute::PermutationOrbits))
    } else if d <= DENSE_MAX_DIM {
        Ok((dense_route(rho, h)?, SldRoute::Dense))
    } else {
        Err(Error::Capacity {
            requested: rho.n_qubits,
            limit: 4,
            hint: "the dense SLD solve is limited to 4 qubits unless rho and H are permutation invariant",
        })
    }
}

fn commutator_derivative(rho: &DMatrix<Complex64>, h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (h * rho - rho * h) * Complex64::new(0.0, -1.0)
}

fn pinv_solve(a: DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(DVector::zeros(b.len()));
    }
    svd.solve(b, PINV_CUTOFF * smax)
        .map_err(|e| Error::NumericalHealth(format!("SLD pseudo-inverse failed: {e}")))
}

fn real_part_checked(v: Complex64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-8 * v.re.abs().max(1.0) {
        return Err(Error::NumericalHealth(format!("{what} has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

fn dense_route(rho: &FullDensityMatrix, h: &DMatrix<Complex64>) -> Result<f64> {
    let d = rho.dim();
    let r = commutator_derivative(&rho.matrix, h);
    // column-major vec: vec(L rho) = (rho^T (x) I) vec L, vec(rho L) = (I (x) rho) vec L
    let eye = DMatrix::<Complex64>::identity(d, d);
    let a = (rho.matrix.transpose().kronecker(&eye) + eye.kronecker(&rho.matrix)) * Complex64::new(0.5, 0.0);
    let b = DVector::from_iterator(d * d, r.iter().copied());
    let x = pinv_solve(a, &b)?;
    let l = DMatrix::from_column_slice(d, d, x.as_slice());
    real_part_checked((&l * &r).trace(), "Tr(L dRho)")
}

struct Orbits {
    n: usize,
    /// `(n01, n10, n11)` -> orbit id
    index: Vec<usize>,
    reps: Vec<(usize, usize)>,
    sizes: Vec<f64>,
    transpose: Vec<usize>,
}

impl Orbits {
    fn new(n: usize) -> Self {
        let side = n + 1;
        let mut index = vec![usize::MAX; side * side * side];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let ln_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        for n11 in 0..=n {
            for n10 in 0..=n - n11 {
                for n01 in 0..=n - n11 - n10 {
                    let n00 = n - n11 - n10 - n01;
                    index[(n01 * side + n10) * side + n11] = reps.len();
                    // positions 0.. hold (1,1), then (1,0), then (0,1), rest (0,0)
                    let mut s = 0usize;
                    let mut sp = 0usize;
                    for pos in 0..n {
                        let bit = 1 << (n - 1 - pos);
                        if pos < n11 {
                            s |= bit;
                            sp |= bit;
                        } else if pos < n11 + n10 {
                            s |= bit;
                        } else if pos < n11 + n10 + n01 {
                            sp |= bit;
                        }
                    }
                    reps.push((s, sp));
                    sizes.push(
                        (ln_fact(n) - ln_fact(n00) - ln_fact(n01) - ln_fact(n10) - ln_fact(n11))
                            .exp()
                            .round(),
                    );
                }
            }
        }
        let mut orbits = Self {
            n,
            index,
            reps,
            sizes,
            transpose: Vec::new(),
        };
        orbits.transpose = orbits.reps.iter().map(|&(s, sp)| orbits.of(sp, s)).collect();
        orbits
    }

    fn of(&self, s: usize, sp: usize) -> usize {
        let side = self.n + 1;
        let n01 = (!s & sp).count_ones() as usize;
        let n10 = (s & !sp).count_ones() as usize;
        let n11 = (s & sp).count_ones() as usize;
        self.index[(n01 * side + n10) * side + n11]
    }

    fn len(&self) -> usize {
        self.reps.len()
    }
}

fn orbit_route(rho: &FullDensityMatrix, h: &DMatrix<Complex64>) -> Result<f64> {
    let n = rho.n_qubits;
    let d = rho.dim();
    let orbits = Orbits::new(n);
    let m = orbits.len();
    let p = &rho.matrix;

    // raw[o'][o] = (L(B_o))[rep o'] with L(X) = (X rho + rho X)/2 and B_o the orbit sum
    let mut raw = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs_raw = DVector::<Complex64>::zeros(m);
    for (row, &(s, sp)) in orbits.reps.iter().enumerate() {
        let mut deriv = Complex64::new(0.0, 0.0);
        for t in 0..d {
            raw[(row, orbits.of(s, t))] += p[(t, sp)] * 0.5;
            raw[(row, orbits.of(t, sp))] += p[(s, t)] * 0.5;
            deriv += h[(s, t)] * p[(t, sp)] - p[(s, t)] * h[(t, sp)];
        }
        rhs_raw[row] = deriv * Complex64::new(0.0, -1.0);
    }
    // orthonormal orbit basis B_o / sqrt(|o|)
    let a = DMatrix::from_fn(m, m, |r, c| {
        raw[(r, c)] * (orbits.sizes[r] / orbits.sizes[c]).sqrt()
    });
    let b = DVector::from_fn(m, |r, _| rhs_raw[r] * orbits.sizes[r].sqrt());
    let x = pinv_solve(a, &b)?;
    // Tr(L R) = sum_o x_o sqrt|o| R[rep(o^T)]
    let total = (0..m).fold(Complex64::new(0.0, 0.0), |acc, o| acc + x[o] * b[orbits.transpose[o]]);
    real_part_checked(total, "Tr(L dRho)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{
        apply_local_channel, collective_operator, embed_dicke, embed_symmetric, LocalChannel,
    };
    use crate::symcore::{cloner_state, Axis, Basis, DickeBasisLabel, Sign};

    #[test]
    fn orbit_counts() {
        for n in 1..6 {
            let o = Orbits::new(n);
            assert_eq!(o.len(), (n + 1) * (n + 2) * (n + 3) / 6);
            let total: f64 = o.sizes.iter().sum();
            assert_eq!(total, (1usize << (2 * n)) as f64);
        }
    }

    #[test]
    fn pure_state_equals_four_variances() {
        let psi = embed_symmetric(&cloner_state::<f64>(3, Sign::Plus).unwrap()).unwrap();
        let h = collective_operator(3, &[0, 1, 2], Axis::Y).unwrap() * Complex64::new(0.5, 0.0);
        let rho = FullDensityMatrix::from_pure(&psi).unwrap();
        let want = pure_state_qfi(&psi, &h).unwrap();
        let (got, route) = sld_quantum_fisher(&rho, &h).unwrap();
        assert_eq!(route, SldRoute::PermutationOrbits);
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
        let (dense, _) = (dense_route(&rho, &h).unwrap(), ());
        assert!((dense - want).abs() < 1e-9 * want);
    }

    #[test]
    fn maximally_mixed_has_no_information() {
        let rho = FullDensityMatrix::maximally_mixed(3).unwrap();
        let h = collective_operator(3, &[0, 1, 2], Axis::X).unwrap();
        assert!(sld_quantum_fisher(&rho, &h).unwrap().0.abs() < 1e-12);
    }

    #[test]
    fn routes_agree_on_noisy_state() {
        let psi = embed_dicke(DickeBasisLabel::new(4, 2, Basis::Z).unwrap()).unwrap();
        let rho = apply_local_channel(&FullDensityMatrix::from_pure(&psi).unwrap(), LocalChannel::BitFlipX(0.8)).unwrap();
        let h = collective_operator(4, &[0, 1, 2, 3], Axis::X).unwrap();
        let a = orbit_route(&rho, &h).unwrap();
        let b = dense_route(&rho, &h).unwrap();
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn non_symmetric_large_input_is_capacity_error() {
        let mut rho = FullDensityMatrix::maximally_mixed(5).unwrap();
        rho.matrix[(1, 1)] += Complex64::new(0.01, 0.0);
        rho.matrix[(0, 0)] -= Complex64::new(0.01, 0.0);
        let h = collective_operator(5, &[0, 1, 2, 3, 4], Axis::X).unwrap();
        assert!(matches!(sld_quantum_fisher(&rho, &h), Err(Error::Capacity { .. })));
    }
}
