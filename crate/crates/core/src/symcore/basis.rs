use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Collective basis in which Dicke coefficients are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// Spin axis of a collective observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Branch label of the cloner output `|psi+->`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `|N, k>` in the given basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DickeBasisLabel {
    pub n_qubits: usize,
    pub excitations: usize,
    pub basis: Basis,
}

impl DickeBasisLabel {
    pub fn new(n_qubits: usize, excitations: usize, basis: Basis) -> Result<Self> {
        if n_qubits == 0 {
            return domain("Dicke label needs at least one qubit");
        }
        if excitations > n_qubits {
            return domain(format!(
                "Dicke label: {excitations} excitations on {n_qubits} qubits"
            ));
        }
        Ok(Self {
            n_qubits,
            excitations,
            basis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_range_checked() {
        assert!(DickeBasisLabel::new(3, 3, Basis::Z).is_ok());
        assert!(DickeBasisLabel::new(3, 4, Basis::Z).is_err());
        assert!(DickeBasisLabel::new(0, 0, Basis::X).is_err());
    }
}
