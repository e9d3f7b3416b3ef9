use serde::{Deserialize, Serialize};

use super::{check_delta, numerics, DiversityError, Exponent};
use crate::distributions::NoiseDensity;
use crate::numerics::{find_root, Interval, NumericsError, SolverDiagnostics, ROOT_TOL};

/// Decision threshold of the first-arrival detector for `m` particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaThreshold {
    pub m: usize,
    pub theta: f64,
    /// The stationarity equation had no root and `theta` sits at the
    /// left edge of the shifted support.
    pub boundary: bool,
    pub diagnostics: Option<SolverDiagnostics>,
}

/// `-ln(1 - F(Δ))`, measured from the left edge of the support.
pub fn fa_diversity<D: NoiseDensity + ?Sized>(density: &D, delta: f64) -> Result<Exponent, DiversityError> {
    check_delta(delta)?;
    let log_sf = density.log_sf(density.support().lo() + delta);
    Ok(if log_sf == f64::NEG_INFINITY {
        Exponent::Infinite
    } else {
        Exponent::Finite(-log_sf)
    })
}

/// Threshold `θ_M` where the first-arrival densities of the two
/// hypotheses cross:
///
/// `ln f(y) - ln f(y-Δ) = (M-1) [ln S(y-Δ) - ln S(y)]`
///
/// searched between the edge of the shifted support and the shifted mode.
/// Zero-mode noise, or no crossing, puts `θ_M` on the support edge.
pub fn fa_threshold<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    m: usize,
) -> Result<FaThreshold, DiversityError> {
    fa_threshold_with(density, delta, m, ROOT_TOL)
}

/// [`fa_threshold`] with an explicit root-bracket tolerance.
pub fn fa_threshold_with<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    m: usize,
    root_tol: f64,
) -> Result<FaThreshold, DiversityError> {
    check_delta(delta)?;
    if m == 0 {
        return Err(DiversityError::InvalidParticleCount);
    }
    let edge = density.support().lo();
    let mode = density.mode_info().mode;
    let boundary = FaThreshold {
        m,
        theta: delta + edge,
        boundary: true,
        diagnostics: None,
    };
    if mode <= edge {
        return Ok(boundary);
    }
    let eta = 1e-12 * (delta + mode);
    let Ok(bracket) = Interval::new(delta + edge + eta, delta + mode) else {
        return Ok(boundary);
    };
    let weight = (m - 1) as f64;
    let h = |y: f64| {
        let likelihood = density.log_pdf(y) - density.log_pdf(y - delta);
        let survival = density.log_sf(y - delta) - density.log_sf(y);
        if weight == 0.0 {
            likelihood
        } else {
            likelihood - weight * survival
        }
    };
    match find_root(h, bracket, root_tol) {
        Ok(root) => Ok(FaThreshold {
            m,
            theta: root.x,
            boundary: false,
            diagnostics: Some(root.diagnostics),
        }),
        Err(NumericsError::NoRoot { .. }) => Ok(boundary),
        Err(e) => Err(numerics("first-arrival threshold")(e)),
    }
}

/// `ln P_err` of the first-arrival detector with `m` particles:
/// `ln(0.5 [S(θ)^M + 1 - S(θ-Δ)^M])`.
pub fn fa_log_error_probability<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    m: usize,
) -> Result<f64, DiversityError> {
    if delta == 0.0 {
        if m == 0 {
            return Err(DiversityError::InvalidParticleCount);
        }
        return Ok(-std::f64::consts::LN_2);
    }
    let t = fa_threshold(density, delta, m)?;
    let mf = m as f64;
    // miss given x = 0: every arrival at or after θ
    let miss = mf * density.log_sf(t.theta);
    // false alarm given x = Δ: at least one arrival before θ
    let exponent = mf * density.log_sf(t.theta - delta);
    let false_alarm = -exponent.exp_m1();
    let log_sum = if false_alarm <= 0.0 {
        miss
    } else {
        let fa = false_alarm.ln();
        let hi = miss.max(fa);
        if hi == f64::NEG_INFINITY {
            hi
        } else {
            hi + ((miss - hi).exp() + (fa - hi).exp()).ln()
        }
    };
    Ok(log_sum - std::f64::consts::LN_2)
}

/// Exact error probability of the first-arrival detector.
pub fn fa_error_probability<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    m: usize,
) -> Result<f64, DiversityError> {
    fa_log_error_probability(density, delta, m).map(f64::exp)
}
