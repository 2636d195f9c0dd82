//! Numerics for permutation-symmetric qubit states produced by the optimal
//! phase-covariant cloner: Dicke-basis state algebra, effective-size measures,
//! distinguishability of the two cloned branches under imperfect
//! measurements, frequency-estimation bounds under local noise, and a
//! brute-force full-Hilbert-space simulator used to validate all of it.
//!
//! Routines that only need field arithmetic are generic over [`Scalar`], so
//! they run in `f32`, `f64` or exact [`Rational`] arithmetic. Eigen-solvers
//! and everything downstream of them are `f64`.

pub mod combinatorics;
pub mod distinguish;
pub mod error;
pub mod linalg;
pub mod macromeasures;
pub mod metrology;
pub mod oracle;
pub mod scalar;
pub mod symcore;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type State = symcore::SymmetricPureState<f64>;
pub type ExactState = symcore::SymmetricPureState<Rational>;
pub type MicroMacro = symcore::MicroMacroState<f64>;
pub type ExactMicroMacro = symcore::MicroMacroState<Rational>;
pub type Covariance = macromeasures::CovarianceMatrix<f64>;
pub type ExactCovariance = macromeasures::CovarianceMatrix<Rational>;
pub type Distribution = distinguish::OutcomeDistribution<f64>;
pub type ExactDistribution = distinguish::OutcomeDistribution<Rational>;
