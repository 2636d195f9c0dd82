//! Dicke-basis representation of permutation-symmetric states.
//!
//! A symmetric `N`-qubit state is stored as `N + 1` coefficients over Dicke
//! states `|N, k>` (`k` excitations). Two bases are used: the computational
//! (`Z`) basis and its Hadamard image (`X`), where `k` counts `|->` factors.
//!
//! Conventions: `sigma_z|0> = |0>`, so `M_z|N, k> = (N - 2k)|N, k>`;
//! `J+|N, k> = sqrt((k + 1)(N - k))|N, k + 1>`, `M_x = J+ + J-` and
//! `M_y = i(J+ - J-)`.

mod basis;
mod observable;
mod split;
mod state;
mod xbasis;

pub use basis::{Axis, Basis, DickeBasisLabel, Sign};
pub use observable::{
    expectation_and_variance, matrix_element, micro_macro_expectation, CollectiveObservable,
    MicroOperator,
};
pub use split::{bipartite_split, reduced_operator, reduced_state, ReducedState, ReductionMode};
pub use state::{
    cloner_state, micro_macro_branch, micro_macro_state, Branch, MicroMacroState,
    SymmetricPureState,
};
pub(crate) use xbasis::{hadamard_overlap, hadamard_overlap_matrix};
pub use xbasis::{
    cloner_x_probabilities, to_x_basis, to_z_basis, x_basis_coefficients, x_basis_coefficients_squared,
};
