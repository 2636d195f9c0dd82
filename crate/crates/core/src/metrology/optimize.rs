use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probabilities::measurement_probabilities_with_derivative;
use super::{measurement_probabilities, quantum_fisher_information, EstimationScenario, Measurement, NoiseKind};
use crate::error::{domain, Error, Result};
use crate::linalg::{count_local_minima, golden_section_minimize, log_grid};

/// Points of the coarse logarithmic `t` grid on `[1e-3/gamma, 5/gamma]`.
pub const TIME_GRID_POINTS: usize = 64;
/// Default spacing of the coarse `alpha` grid on `[0, pi/2]`.
pub const ANGLE_GRID_STEP: f64 = 0.05;

const ZERO_PROB: f64 = 1e-14;
const FD_TOL: f64 = 1e-5;
const GOLDEN_TOL: f64 = 1e-9;
const GOLDEN_EVALS: usize = 200;

fn fisher_from(p: &[f64], dp: &[f64]) -> (f64, usize) {
    let mut f = 0.0;
    let mut divergent = 0;
    for (&s, &ds) in p.iter().zip(dp) {
        if s < ZERO_PROB {
            if ds.abs() >= ZERO_PROB {
                divergent += 1;
            }
            continue;
        }
        f += ds * ds / s;
    }
    (f, divergent)
}

fn classical_fisher_fast(scenario: &EstimationScenario, t: f64, alpha: f64) -> Result<f64> {
    let (p, dp) = measurement_probabilities_with_derivative(scenario, t, alpha)?;
    Ok(fisher_from(&p, &dp).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalFisher {
    /// From the analytic derivative.
    pub fisher: f64,
    /// Same sum with central finite differences.
    pub finite_difference: f64,
    /// Outcomes with vanishing probability but non-vanishing slope; they
    /// signal a genuine divergence and are left out of the sum.
    pub divergent_outcomes: usize,
}

/// `F = sum_i (d s_i / d omega)^2 / s_i`, cross-checked by central differences.
pub fn classical_fisher_information(scenario: &EstimationScenario, t: f64, alpha: f64) -> Result<ClassicalFisher> {
    let (p, dp) = measurement_probabilities_with_derivative(scenario, t, alpha)?;
    let (fisher, divergent_outcomes) = fisher_from(&p, &dp);
    // step of 1e-4 in the precession angle
    let h = 1e-4 / t.max(1e-12);
    let up = measurement_probabilities(&EstimationScenario { omega: scenario.omega + h, ..*scenario }, t, alpha)?;
    let dn = measurement_probabilities(&EstimationScenario { omega: scenario.omega - h, ..*scenario }, t, alpha)?;
    let fd: Vec<f64> = up.iter().zip(&dn).map(|(a, b)| (a - b) / (2.0 * h)).collect();
    let finite_difference = p
        .iter()
        .zip(&dp)
        .zip(&fd)
        .filter(|((&s, &ds), _)| s >= ZERO_PROB || ds.abs() < ZERO_PROB && s >= ZERO_PROB)
        .map(|((&s, _), &d)| d * d / s)
        .sum::<f64>();
    let scale = fisher.max(finite_difference).max(1e-10 * (t * scenario.n_qubits as f64).powi(2));
    if (fisher - finite_difference).abs() > FD_TOL * scale {
        return Err(Error::NumericalHealth(format!(
            "classical Fisher information {fisher} disagrees with finite differences {finite_difference}"
        )));
    }
    Ok(ClassicalFisher {
        fisher,
        finite_difference,
        divergent_outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleOptimum {
    pub alpha: f64,
    pub fisher: f64,
    /// Fisher information does not depend on `alpha`; `alpha = 0` reported.
    pub flat: bool,
}

pub fn optimize_measurement_angle(scenario: &EstimationScenario, t: f64) -> Result<AngleOptimum> {
    optimize_measurement_angle_with(scenario, t, ANGLE_GRID_STEP)
}

/// Grid search over `alpha in [0, pi/2]` with spacing about `grid_step`,
/// refined by golden section around the best grid point.
pub fn optimize_measurement_angle_with(scenario: &EstimationScenario, t: f64, grid_step: f64) -> Result<AngleOptimum> {
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return domain(format!("angle grid step {grid_step} outside (0, 1)"));
    }
    let top = std::f64::consts::FRAC_PI_2;
    let cells = (top / grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=cells).map(|i| top * i as f64 / cells as f64).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&a| classical_fisher_fast(scenario, t, a))
        .collect::<Result<_>>()?;
    let (best, vmax) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    if vmax - vmin <= 1e-12 * vmax.abs().max(1e-300) {
        return Ok(AngleOptimum {
            alpha: 0.0,
            fisher: values[0],
            flat: true,
        });
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(cells)];
    let (alpha, neg) = golden_section_minimize(
        |a| classical_fisher_fast(scenario, t, a).map_or(f64::INFINITY, |f| -f),
        lo,
        hi,
        GOLDEN_TOL,
        GOLDEN_EVALS,
    );
    let (alpha, fisher) = if -neg >= vmax { (alpha, -neg) } else { (grid[best], vmax) };
    Ok(AngleOptimum {
        alpha,
        fisher,
        flat: false,
    })
}

/// Fisher information at `t` for the scenario's measurement, with the angle
/// used (if any).
pub fn fisher_at(scenario: &EstimationScenario, t: f64) -> Result<(f64, Option<f64>)> {
    match scenario.measurement {
        Measurement::OptimalGlobal => Ok((quantum_fisher_information(scenario, t)?, None)),
        Measurement::CollectiveZ => Ok((classical_fisher_fast(scenario, t, 0.0)?, Some(0.0))),
        Measurement::RotatedCollective(a) => Ok((classical_fisher_fast(scenario, t, a)?, Some(a))),
        Measurement::OptimizedLocal => {
            let opt = optimize_measurement_angle(scenario, t)?;
            Ok((opt.fisher, Some(opt.alpha)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeOptimum {
    pub t: f64,
    pub fisher: f64,
    pub delta_omega: f64,
    /// The sampled `delta omega(t)` has more than one local minimum.
    pub non_unimodal: bool,
}

fn uncertainty(t: f64, total_time: f64, fisher: f64) -> f64 {
    if fisher > 0.0 {
        (t / (total_time * fisher)).sqrt()
    } else {
        f64::INFINITY
    }
}

/// Minimises `delta omega(t) = sqrt(t / (T F(t)))` over a logarithmic grid on
/// `[1e-3/gamma, 5/gamma]`, then by golden section between the neighbours of
/// the best grid point.
pub fn cramer_rao_uncertainty(
    scenario: &EstimationScenario,
    fisher: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<TimeOptimum> {
    scenario.validate()?;
    let ts = log_grid(1e-3 / scenario.gamma, 5.0 / scenario.gamma, TIME_GRID_POINTS);
    let fs: Vec<f64> = ts.par_iter().map(|&t| fisher(t)).collect::<Result<_>>()?;
    let dw: Vec<f64> = ts
        .iter()
        .zip(&fs)
        .map(|(&t, &f)| uncertainty(t, scenario.total_time, f))
        .collect();
    let (best, _) = dw
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    if !dw[best].is_finite() {
        return Err(Error::NumericalHealth("Fisher information vanishes on the whole time grid".into()));
    }
    let non_unimodal = count_local_minima(&dw) > 1;
    let lo = ts[best.saturating_sub(1)];
    let hi = ts[(best + 1).min(ts.len() - 1)];
    let (t, _) = golden_section_minimize(
        |t| fisher(t).map_or(f64::INFINITY, |f| uncertainty(t, scenario.total_time, f)),
        lo,
        hi,
        GOLDEN_TOL,
        GOLDEN_EVALS,
    );
    let f = fisher(t)?;
    let d = uncertainty(t, scenario.total_time, f);
    let (t, f, d) = if d <= dw[best] { (t, f, d) } else { (ts[best], fs[best], dw[best]) };
    Ok(TimeOptimum {
        t,
        fisher: f,
        delta_omega: d,
        non_unimodal,
    })
}

/// `sqrt(2 e gamma / (T N))`: uncorrelated qubits at their optimal time `1/(2 gamma)`.
pub fn product_state_uncertainty(n_qubits: usize, gamma: f64, total_time: f64) -> f64 {
    (2.0 * std::f64::consts::E * gamma / (total_time * n_qubits as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult {
    pub n_qubits: usize,
    pub measurement: Measurement,
    pub noise: NoiseKind,
    pub fisher: f64,
    pub optimal_t: f64,
    pub alpha: Option<f64>,
    pub delta_omega: f64,
    pub product_baseline: f64,
    /// `1 - delta omega / delta omega_PS`; independent of `T`.
    pub relative_improvement: f64,
    pub non_unimodal: bool,
}

/// Optimal-time uncertainty of the scenario and its gain over product states.
pub fn estimate(scenario: &EstimationScenario) -> Result<FisherResult> {
    let opt = cramer_rao_uncertainty(scenario, |t| Ok(fisher_at(scenario, t)?.0))?;
    let alpha = fisher_at(scenario, opt.t)?.1;
    if scenario.measurement != Measurement::OptimalGlobal {
        classical_fisher_information(scenario, opt.t, alpha.unwrap_or(0.0))?;
    }
    let baseline = product_state_uncertainty(scenario.n_qubits, scenario.gamma, scenario.total_time);
    Ok(FisherResult {
        n_qubits: scenario.n_qubits,
        measurement: scenario.measurement,
        noise: scenario.noise,
        fisher: opt.fisher,
        optimal_t: opt.t,
        alpha,
        delta_omega: opt.delta_omega,
        product_baseline: baseline,
        relative_improvement: 1.0 - opt.delta_omega / baseline,
        non_unimodal: opt.non_unimodal,
    })
}

/// One row per `N`, evaluated in parallel; order follows `ns`.
pub fn relative_improvement_curve(
    noise: NoiseKind,
    omega: f64,
    gamma: f64,
    measurement: Measurement,
    ns: &[usize],
) -> Result<Vec<FisherResult>> {
    ns.par_iter()
        .map(|&n| estimate(&EstimationScenario::new(n, omega, gamma, noise, measurement)?))
        .collect()
}
