use num_complex::Complex;
use num_traits::{One, Zero};

use super::basis::{Basis, DickeBasisLabel, Sign};
use crate::error::{domain, require_odd, Error, Result};
use crate::scalar::{Real, Scalar};

/// Pure state on the symmetric subspace of `n_qubits` qubits.
///
/// Stored as unnormalised coefficients together with their squared norm, so
/// that states like `(|a> + |b>)/sqrt(2)` stay exact in rational arithmetic:
/// the amplitudes are `coeffs / sqrt(norm_sq)` and every density-matrix entry
/// `c_a c_b^* / norm_sq` is a field element.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPureState<S> {
    n_qubits: usize,
    basis: Basis,
    coeffs: Vec<Complex<S>>,
    norm_sq: S,
}

impl<S: Scalar> SymmetricPureState<S> {
    pub fn from_coefficients(n_qubits: usize, basis: Basis, coeffs: Vec<Complex<S>>) -> Result<Self> {
        if n_qubits == 0 {
            return domain("symmetric state needs at least one qubit");
        }
        if coeffs.len() != n_qubits + 1 {
            return domain(format!(
                "{} coefficients given for {} qubits (need {})",
                coeffs.len(),
                n_qubits,
                n_qubits + 1
            ));
        }
        let norm_sq = coeffs
            .iter()
            .fold(S::zero(), |acc, c| acc + c.norm_sqr());
        if norm_sq.is_zero() {
            return domain("zero vector is not a state");
        }
        Ok(Self {
            n_qubits,
            basis,
            coeffs,
            norm_sq,
        })
    }

    pub fn from_real_coefficients(n_qubits: usize, basis: Basis, coeffs: Vec<S>) -> Result<Self> {
        Self::from_coefficients(
            n_qubits,
            basis,
            coeffs.into_iter().map(|c| Complex::new(c, S::zero())).collect(),
        )
    }

    pub fn dicke(label: DickeBasisLabel) -> Self {
        let mut coeffs = vec![Complex::zero(); label.n_qubits + 1];
        coeffs[label.excitations] = Complex::one();
        Self {
            n_qubits: label.n_qubits,
            basis: label.basis,
            coeffs,
            norm_sq: S::one(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Unnormalised coefficients; see [`Self::norm_sq`].
    pub fn coefficients(&self) -> &[Complex<S>] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> &S {
        &self.norm_sq
    }

    /// Normalised amplitudes. Fails in exact arithmetic when the norm is not a
    /// perfect square.
    pub fn amplitudes(&self) -> Result<Vec<Complex<S>>> {
        let norm = self
            .norm_sq
            .try_sqrt()
            .ok_or_else(|| Error::InexactSqrt(format!("{:?}", self.norm_sq)))?;
        Ok(self
            .coeffs
            .iter()
            .map(|c| Complex::new(c.re.clone() / norm.clone(), c.im.clone() / norm.clone()))
            .collect())
    }

    /// Outcome probabilities of a measurement in the state's own Dicke basis.
    pub fn probabilities(&self) -> Vec<S> {
        self.coeffs
            .iter()
            .map(|c| c.norm_sqr() / self.norm_sq.clone())
            .collect()
    }

    /// `<a| rho |b>` in the state's basis.
    pub fn density_entry(&self, a: usize, b: usize) -> Complex<S> {
        let v = self.coeffs[a].clone() * self.coeffs[b].conj();
        Complex::new(v.re / self.norm_sq.clone(), v.im / self.norm_sq.clone())
    }

    /// Indices with non-zero coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| k)
    }

    /// `<self|other>`; both states must share `N` and basis.
    pub fn inner(&self, other: &Self) -> Result<Complex<S>> {
        self.check_compatible(other)?;
        let raw = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(Complex::<S>::zero(), |acc, (a, b)| acc + a.conj() * b.clone());
        let norm = (self.norm_sq.clone() * other.norm_sq.clone())
            .try_sqrt()
            .ok_or_else(|| Error::InexactSqrt("product of state norms".into()))?;
        Ok(Complex::new(raw.re / norm.clone(), raw.im / norm))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits || self.basis != other.basis {
            return domain(format!(
                "states on ({}, {:?}) and ({}, {:?}) are not comparable",
                self.n_qubits, self.basis, other.n_qubits, other.basis
            ));
        }
        Ok(())
    }

    pub fn to_f64(&self) -> SymmetricPureState<f64> {
        let norm = self.norm_sq.to_f64_lossy().sqrt();
        SymmetricPureState {
            n_qubits: self.n_qubits,
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(c.re.to_f64_lossy() / norm, c.im.to_f64_lossy() / norm))
                .collect(),
            norm_sq: 1.0,
        }
    }
}

impl<S: Real> SymmetricPureState<S> {
    /// Same state with unit-norm coefficients.
    pub fn normalized(&self) -> Self {
        let norm = self.norm_sq.sqrt();
        Self {
            n_qubits: self.n_qubits,
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c / norm).collect(),
            norm_sq: S::one(),
        }
    }
}

/// Cloner output `|psi+-> = (|N, (N-1)/2> +- |N, (N+1)/2>)/sqrt(2)`, Z basis.
pub fn cloner_state<S: Scalar>(n_qubits: usize, sign: Sign) -> Result<SymmetricPureState<S>> {
    require_odd(n_qubits)?;
    let k0 = (n_qubits - 1) / 2;
    let mut coeffs = vec![Complex::<S>::zero(); n_qubits + 1];
    coeffs[k0] = Complex::one();
    coeffs[k0 + 1] = Complex::new(S::from_int(sign.factor()), S::zero());
    SymmetricPureState::from_coefficients(n_qubits, Basis::Z, coeffs)
}

/// One explicit qubit entangled with a symmetric register:
/// `mu_+ |+> (x) |macro_plus> + mu_- |-> (x) |macro_minus>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroMacroState<S> {
    micro: [Complex<S>; 2],
    micro_norm_sq: S,
    macro_plus: SymmetricPureState<S>,
    macro_minus: SymmetricPureState<S>,
}

impl<S: Scalar> MicroMacroState<S> {
    /// `micro` holds unnormalised coefficients on `(|+>, |->)`; the macro
    /// components must be orthogonal states on the same register.
    pub fn new(
        micro: [Complex<S>; 2],
        macro_plus: SymmetricPureState<S>,
        macro_minus: SymmetricPureState<S>,
    ) -> Result<Self> {
        macro_plus.check_compatible(&macro_minus)?;
        let micro_norm_sq = micro[0].norm_sqr() + micro[1].norm_sqr();
        if micro_norm_sq.is_zero() {
            return domain("micro part is the zero vector");
        }
        let overlap = macro_plus
            .coefficients()
            .iter()
            .zip(macro_minus.coefficients())
            .fold(Complex::<S>::zero(), |acc, (a, b)| acc + a.conj() * b.clone());
        let scale = macro_plus.norm_sq().clone() * macro_minus.norm_sq().clone();
        let tol = if S::EXACT {
            S::zero()
        } else {
            S::from_f64(1e-20).unwrap_or_else(S::zero) * scale
        };
        if overlap.norm_sqr() > tol {
            return domain("macro components of a micro-macro state must be orthogonal");
        }
        Ok(Self {
            micro,
            micro_norm_sq,
            macro_plus,
            macro_minus,
        })
    }

    pub fn n_macro(&self) -> usize {
        self.macro_plus.n_qubits()
    }

    pub fn micro_coefficients(&self) -> &[Complex<S>; 2] {
        &self.micro
    }

    pub fn micro_norm_sq(&self) -> &S {
        &self.micro_norm_sq
    }

    /// Macro component paired with `|+>` on the micro qubit.
    pub fn macro_plus(&self) -> &SymmetricPureState<S> {
        &self.macro_plus
    }

    /// Macro component paired with `|->` on the micro qubit.
    pub fn macro_minus(&self) -> &SymmetricPureState<S> {
        &self.macro_minus
    }

    pub(crate) fn macro_component(&self, micro_index: usize) -> &SymmetricPureState<S> {
        if micro_index == 0 {
            &self.macro_plus
        } else {
            &self.macro_minus
        }
    }

    pub fn to_f64(&self) -> MicroMacroState<f64> {
        let norm = self.micro_norm_sq.to_f64_lossy().sqrt();
        let conv = |c: &Complex<S>| Complex::new(c.re.to_f64_lossy() / norm, c.im.to_f64_lossy() / norm);
        MicroMacroState {
            micro: [conv(&self.micro[0]), conv(&self.micro[1])],
            micro_norm_sq: 1.0,
            macro_plus: self.macro_plus.to_f64(),
            macro_minus: self.macro_minus.to_f64(),
        }
    }
}

/// `(|+> (x) |psi-> - |-> (x) |psi+>)/sqrt(2)` on `N + 1` qubits.
pub fn micro_macro_state<S: Scalar>(n_qubits: usize) -> Result<MicroMacroState<S>> {
    MicroMacroState::new(
        [Complex::one(), -Complex::<S>::one()],
        cloner_state(n_qubits, Sign::Minus)?,
        cloner_state(n_qubits, Sign::Plus)?,
    )
}

/// The two product branches of the micro-macro state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `|+> (x) |psi->`
    Zero,
    /// `|-> (x) |psi+>`
    One,
}

pub fn micro_macro_branch<S: Scalar>(n_qubits: usize, branch: Branch) -> Result<MicroMacroState<S>> {
    let micro = match branch {
        Branch::Zero => [Complex::one(), Complex::zero()],
        Branch::One => [Complex::zero(), Complex::one()],
    };
    MicroMacroState::new(
        micro,
        cloner_state(n_qubits, Sign::Minus)?,
        cloner_state(n_qubits, Sign::Plus)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    #[test]
    fn single_qubit_cloner_is_plus_state() {
        let s = cloner_state::<f64>(1, Sign::Plus).unwrap();
        let a = s.amplitudes().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0].re - h).abs() < 1e-15 && (a[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn three_qubit_minus_branch() {
        let s = cloner_state::<f64>(3, Sign::Minus).unwrap();
        let a = s.amplitudes().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(a[0].re, 0.0);
        assert!((a[1].re - h).abs() < 1e-15);
        assert!((a[2].re + h).abs() < 1e-15);
        assert_eq!(a[3].re, 0.0);
    }

    #[test]
    fn even_n_is_rejected() {
        assert!(matches!(
            cloner_state::<f64>(4, Sign::Plus),
            Err(Error::UnsupportedInput(_))
        ));
        assert!(micro_macro_state::<f64>(2).is_err());
        assert!(cloner_state::<f64>(0, Sign::Plus).is_err());
    }

    #[test]
    fn exact_cloner_state_keeps_rational_density() {
        let s = cloner_state::<Rational>(5, Sign::Minus).unwrap();
        assert_eq!(s.norm_sq(), &Rational::from_integer(2.into()));
        let rho = s.density_entry(2, 3);
        assert_eq!(rho.re, Rational::new((-1).into(), 2.into()));
        assert!(s.amplitudes().is_err());
    }

    #[test]
    fn micro_macro_requires_orthogonal_components() {
        let p = cloner_state::<f64>(3, Sign::Plus).unwrap();
        assert!(MicroMacroState::new([Complex::one(), Complex::one()], p.clone(), p).is_err());
    }

    proptest! {
        #[test]
        fn cloner_branches_are_unit_norm_and_orthogonal(half in 0usize..60) {
            let n = 2 * half + 1;
            let p = cloner_state::<f64>(n, Sign::Plus).unwrap();
            let m = cloner_state::<f64>(n, Sign::Minus).unwrap();
            let total: f64 = p.probabilities().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(p.inner(&m).unwrap().norm() < 1e-12);
            prop_assert!((p.inner(&p).unwrap().re - 1.0).abs() < 1e-12);
        }
    }
}
