use serde::{Deserialize, Serialize};

use super::SimulationResult;
use crate::detectors::DetectorKind;

/// Grid points with fewer observed errors are left out of slope fits.
pub const MIN_ERRORS: u64 = 100;

const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score 95% interval for `errors` out of `n`.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

/// Weighted least-squares fit of `-ln p` against `M`.
///
/// `points` holds `(M, p, weight)`. With error counts as weights the
/// weights are inverse variances of `-ln p̂`, so the standard error is
/// `1/sqrt(Sxx)`, inflated by the reduced chi-square when the points
/// scatter more than that. Needs at least three points.
pub fn fit_slope(points: &[(f64, f64, f64)]) -> Option<SlopeFit> {
    if points.len() < 3 || points.iter().any(|&(_, p, w)| !(p > 0.0) || !(w > 0.0)) {
        return None;
    }
    let sw: f64 = points.iter().map(|p| p.2).sum();
    let xbar = points.iter().map(|&(x, _, w)| w * x).sum::<f64>() / sw;
    let ybar = points.iter().map(|&(_, p, w)| -w * p.ln()).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|&(x, _, w)| w * (x - xbar).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .map(|&(x, p, w)| w * (x - xbar) * (-p.ln() - ybar))
        .sum();
    let slope = sxy / sxx;
    let chi2: f64 = points
        .iter()
        .map(|&(x, p, w)| w * (-p.ln() - ybar - slope * (x - xbar)).powi(2))
        .sum();
    let reduced = chi2 / (points.len() - 2) as f64;
    Some(SlopeFit {
        slope,
        intercept: ybar - slope * xbar,
        stderr: (reduced.max(1.0) / sxx).sqrt(),
    })
}

/// Empirical diversity of one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityFit {
    pub detector: DetectorKind,
    pub d_hat: Option<f64>,
    pub stderr: Option<f64>,
    /// Grid points that entered the fit.
    pub used_m: Vec<usize>,
    /// Some grid points had fewer than [`MIN_ERRORS`] errors and were
    /// dropped.
    pub truncated: bool,
}

/// Fits `D̂` for every detector in `result`, using only grid points with
/// at least [`MIN_ERRORS`] observed errors.
pub fn fit_empirical_diversity(result: &SimulationResult) -> Vec<DiversityFit> {
    result
        .config
        .detectors
        .iter()
        .map(|&detector| {
            let cells: Vec<_> = result.cells.iter().filter(|c| c.detector == detector).collect();
            let usable: Vec<_> = cells.iter().filter(|c| c.n_errors >= MIN_ERRORS).collect();
            let points: Vec<_> = usable
                .iter()
                .map(|c| (c.m as f64, c.p_hat, c.n_errors as f64))
                .collect();
            let fit = fit_slope(&points);
            DiversityFit {
                detector,
                d_hat: fit.map(|f| f.slope),
                stderr: fit.map(|f| f.stderr),
                used_m: usable.iter().map(|c| c.m).collect(),
                truncated: usable.len() < cells.len(),
            }
        })
        .collect()
}
