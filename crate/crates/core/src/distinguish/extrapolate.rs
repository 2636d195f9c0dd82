use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Condition number of the design matrix above which the fit is flagged.
const ILL_CONDITIONED: f64 = 1e10;

/// Least-squares fit `D(N) = limit + a/N + b/N^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub limit: f64,
    pub a: f64,
    pub b: f64,
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

/// Fits `(N, D)` samples; needs at least five points.
pub fn extrapolate_limit(points: &[(usize, f64)]) -> Result<LimitFit> {
    if points.len() < 5 {
        return domain(format!("extrapolation needs at least 5 points, got {}", points.len()));
    }
    if points.iter().any(|&(n, d)| n == 0 || !d.is_finite()) {
        return domain("extrapolation points need N >= 1 and finite values");
    }
    let design = DMatrix::from_fn(points.len(), 3, |r, c| (points[r].0 as f64).powi(-(c as i32)));
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let coef = svd
        .solve(&y, 1e-14 * smax)
        .map_err(|e| Error::NumericalHealth(format!("least-squares solve failed: {e}")))?;
    let residuals: Vec<f64> = (&y - &design * &coef).iter().copied().collect();
    let rms_residual = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(LimitFit {
        limit: coef[0],
        a: coef[1],
        b: coef[2],
        residuals,
        rms_residual,
        condition_number,
        ill_conditioned: condition_number > ILL_CONDITIONED,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series() {
        let pts: Vec<_> = (0..8).map(|i| (2 * i + 1, 0.7)).collect();
        let f = extrapolate_limit(&pts).unwrap();
        assert!((f.limit - 0.7).abs() < 1e-12);
        assert!(f.a.abs() < 1e-10 && f.b.abs() < 1e-10);
        assert!(!f.ill_conditioned);
    }

    #[test]
    fn synthetic_inverse_series() {
        let pts: Vec<_> = (1..40).map(|i| (2 * i + 1, 0.8 + 1.0 / (2 * i + 1) as f64)).collect();
        let f = extrapolate_limit(&pts).unwrap();
        assert!((f.limit - 0.8).abs() < 1e-8);
        assert!((f.a - 1.0).abs() < 1e-8);
        assert!(f.b.abs() < 1e-8);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn degenerate_grid_is_flagged() {
        let pts: Vec<_> = (0..6).map(|_| (7usize, 0.8)).collect();
        assert!(extrapolate_limit(&pts).unwrap().ill_conditioned);
        assert!(extrapolate_limit(&pts[..4]).is_err());
    }
}
