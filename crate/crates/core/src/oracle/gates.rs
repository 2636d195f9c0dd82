use num_complex::Complex64;

use crate::symcore::Axis;

/// Single-qubit operator, row-major.
pub type Gate = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hadamard() -> Gate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn pauli(axis: Axis) -> Gate {
    match axis {
        Axis::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        Axis::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        Axis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
    }
}

/// `exp(-i angle sigma_axis / 2)`.
pub fn rotation(axis: Axis, angle: f64) -> Gate {
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let p = pauli(axis);
    let mut g = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            let id = if r == col { cs } else { 0.0 };
            g[r][col] = c(id, 0.0) - c(0.0, sn) * p[r][col];
        }
    }
    g
}

pub(crate) fn adjoint(g: &Gate) -> Gate {
    [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]]
}

pub(crate) fn scale(g: &Gate, s: f64) -> Gate {
    [[g[0][0] * s, g[0][1] * s], [g[1][0] * s, g[1][1] * s]]
}

pub(crate) fn identity() -> Gate {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}
