//! Symmetric-subspace routines against explicit full-register simulation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use clonemacro::linalg::hermitian_trace_norm;
use clonemacro::macromeasures::{covariance_matrix, max_local_variance, subgroup_success_probability, SubgroupMode};
use clonemacro::metrology::{quantum_fisher_information, EstimationScenario, Measurement, NoiseKind};
use clonemacro::oracle::{
    collective_operator, embed_dicke, embed_micro_macro, embed_symmetric, pauli, pure_state_qfi, single_site_operator,
    FullDensityMatrix,
};
use clonemacro::symcore::{cloner_state, micro_macro_state, Axis, Basis, DickeBasisLabel, Sign};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn optimal_local_operator_has_the_predicted_variance() {
    let n = 5;
    let state = micro_macro_state::<f64>(n).unwrap();
    let opt = max_local_variance(&state).unwrap();
    let psi = embed_micro_macro(&state).unwrap();
    let macro_qubits: Vec<usize> = (1..=n).collect();
    let dim = 1 << (n + 1);
    let mut op = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, axis) in Axis::ALL.into_iter().enumerate() {
        op += single_site_operator(n + 1, 0, &pauli(axis)).unwrap() * c(opt.coefficients[i]);
        op += collective_operator(n + 1, &macro_qubits, axis).unwrap() * c(opt.coefficients[3 + i]);
    }
    let mean = psi.expectation(&op).re;
    let variance = psi.expectation(&(&op * &op)).re - mean * mean;
    let closed = 0.5 * ((n + 1) * (n + 1)) as f64 + (n + 1) as f64;
    assert!((variance - closed).abs() <= 1e-12 * closed, "{variance} vs {closed}");
    assert!((opt.variance - closed).abs() <= 1e-12 * closed);
}

#[test]
fn register_covariance_from_explicit_operators() {
    for n in [3usize, 5, 7] {
        let s = cloner_state::<f64>(n, Sign::Plus).unwrap();
        let model = covariance_matrix(&s).unwrap().to_f64();
        let psi = embed_symmetric(&s).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let ops: Vec<_> = Axis::ALL.iter().map(|&a| collective_operator(n, &all, a).unwrap()).collect();
        for r in 0..3 {
            for col in 0..3 {
                let sym = (&ops[r] * &ops[col] + &ops[col] * &ops[r]) * c(0.5);
                let v = psi.expectation(&sym).re - psi.expectation(&ops[r]).re * psi.expectation(&ops[col]).re;
                assert!((v - model[(r, col)]).abs() < 1e-12, "N={n} ({r},{col})");
            }
        }
    }
}

#[test]
fn subgroup_probability_is_half_plus_quarter_trace_distance() {
    let (n, k) = (7, 3);
    let rho = |sign| FullDensityMatrix::from_pure(&embed_symmetric(&cloner_state::<f64>(n, sign).unwrap()).unwrap()).unwrap();
    let kept: Vec<usize> = (0..k).collect();
    let diff = rho(Sign::Plus).partial_trace(&kept).unwrap().matrix - rho(Sign::Minus).partial_trace(&kept).unwrap().matrix;
    let oracle = 0.5 + 0.25 * hermitian_trace_norm(&diff);
    let model = subgroup_success_probability(n, k, SubgroupMode::Exact).unwrap().probability;
    assert!((oracle - model).abs() < 1e-12, "{oracle} vs {model}");
}

#[test]
fn noiseless_limit_of_the_fisher_information() {
    let t = 0.8;
    for n in [3usize, 5, 7] {
        let k0 = (n - 1) / 2;
        let dicke = embed_dicke(DickeBasisLabel::new(n, k0, Basis::Z).unwrap()).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let h = collective_operator(n, &all, Axis::X).unwrap() * c(t / 2.0);
        let pure = pure_state_qfi(&dicke, &h).unwrap();
        let closed = t * t * (n * n + 2 * n - 1) as f64 / 2.0;
        assert!((pure - closed).abs() < 1e-10 * closed, "N={n}: {pure} vs {closed}");
        let s = EstimationScenario::new(n, 1.0, 1e-9, NoiseKind::BitFlip, Measurement::OptimalGlobal).unwrap();
        let weak = quantum_fisher_information(&s, t).unwrap();
        assert!((weak - closed).abs() < 1e-6 * closed, "N={n}: {weak} vs {closed}");
    }
}
