//! Analytic diversity gains of the ML, linear and first-arrival detectors.
//!
//! All exponents are in nats per released particle. Integrals and
//! thresholds are taken relative to the left edge of the noise support,
//! which is 0 for every family except a shifted Lévy law.

mod closed_form;
mod first_arrival;
mod unimodal;

pub use closed_form::{closed_form_diversity, closed_form_rate, ClosedForms};
pub use first_arrival::{
    fa_diversity, fa_error_probability, fa_log_error_probability, fa_threshold,
    fa_threshold_with, FaThreshold,
};
pub use unimodal::{unimodality_certificate, UnimodalityReport};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{rate_function, NoiseDensity};
use crate::numerics::{
    find_root, integrate_with, minimize_1d, Interval, NumericsError, QuadratureOptions, RateValue,
    SolverDiagnostics, Tolerances,
};

/// An error exponent. `Infinite` marks the zero-error regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(v) => Some(v),
            Exponent::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// Ordering helper: `Infinite` compares as `+inf`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl From<RateValue> for Exponent {
    fn from(r: RateValue) -> Self {
        match r {
            RateValue::Finite(v) => Exponent::Finite(v),
            RateValue::Infinite => Exponent::Infinite,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiversityError {
    #[error("symbol spacing must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("particle count must be at least 1")]
    InvalidParticleCount,
    #[error("{context}: {source}")]
    Numerics {
        context: &'static str,
        #[source]
        source: NumericsError,
    },
}

pub(crate) fn numerics(context: &'static str) -> impl FnOnce(NumericsError) -> DiversityError {
    move |source| DiversityError::Numerics { context, source }
}

pub(crate) fn check_delta(delta: f64) -> Result<(), DiversityError> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(DiversityError::InvalidDelta(delta))
    }
}

/// Optimal exponent of the ML detector and the minimising `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chernoff {
    pub d_ml: Exponent,
    pub s_star: f64,
    pub diagnostics: SolverDiagnostics,
}

/// Exponent of the sample-mean detector and its threshold offset `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub d_lin: Exponent,
    /// The decision threshold is `mean + alpha`; `None` when the noise
    /// has no finite mean or the two tails never balance.
    pub alpha: Option<f64>,
    pub diagnostics: Option<SolverDiagnostics>,
}

/// All three exponents for one noise law and spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub delta: f64,
    pub d_ml: Exponent,
    pub d_fa: Exponent,
    pub d_lin: Exponent,
    pub s_star: f64,
    pub alpha: Option<f64>,
    pub ml_diagnostics: SolverDiagnostics,
    pub lin_diagnostics: Option<SolverDiagnostics>,
}

fn overlap<D: NoiseDensity + ?Sized>(density: &D, delta: f64) -> Option<Interval> {
    let support = density.support();
    Interval::new(support.lo() + delta, support.hi()).ok()
}

/// `ln ∫ f(y)^s f(y-Δ)^{1-s} dy` over the overlap of the two shifted
/// supports. Convex in `s`.
pub fn chernoff_log_coefficient<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    s: f64,
) -> Result<f64, DiversityError> {
    chernoff_log_coefficient_with(density, delta, s, &Tolerances::default())
}

pub fn chernoff_log_coefficient_with<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    s: f64,
    tol: &Tolerances,
) -> Result<f64, DiversityError> {
    check_delta(delta)?;
    let Some(domain) = overlap(density, delta) else {
        return Ok(f64::NEG_INFINITY);
    };
    let weight = |w: f64, log_f: f64| if w == 0.0 { 0.0 } else { w * log_f };
    let integrand = |y: f64| {
        let e = weight(s, density.log_pdf(y)) + weight(1.0 - s, density.log_pdf(y - delta));
        if e == f64::NEG_INFINITY {
            0.0
        } else {
            e.exp()
        }
    };
    let opts = QuadratureOptions {
        rel_tol: tol.quad_rel,
        ..QuadratureOptions::default()
    };
    let q = integrate_with(integrand, domain, &opts).map_err(numerics("Chernoff integral"))?;
    Ok(q.value.ln())
}

/// ML exponent: `-min_{s ∈ [0,1]} ln ∫ f(y)^s f(y-Δ)^{1-s} dy`.
pub fn chernoff_diversity<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
) -> Result<Chernoff, DiversityError> {
    chernoff_diversity_with(density, delta, &Tolerances::default())
}

pub fn chernoff_diversity_with<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    tol: &Tolerances,
) -> Result<Chernoff, DiversityError> {
    check_delta(delta)?;
    if overlap(density, delta).is_none() {
        return Ok(Chernoff {
            d_ml: Exponent::Infinite,
            s_star: 0.5,
            diagnostics: SolverDiagnostics {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        });
    }
    // Quadrature failures surface through this cell.
    let failure = std::cell::Cell::new(None);
    let objective = |s: f64| match chernoff_log_coefficient_with(density, delta, s, tol) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let unit = Interval::new(0.0, 1.0).expect("unit interval");
    let found = minimize_1d(objective, unit, tol.min);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let m = found.map_err(numerics("Chernoff minimisation"))?;
    let d_ml = if m.min == f64::NEG_INFINITY {
        Exponent::Infinite
    } else {
        Exponent::Finite((-m.min).max(0.0))
    };
    Ok(Chernoff {
        d_ml,
        s_star: m.argmin,
        diagnostics: m.diagnostics,
    })
}

/// Sample-mean detector exponent `Λ*(μ+α)` with `α` balancing the two
/// tails: `Λ*(μ+α) = Λ*(μ-Δ+α)`.
///
/// Noise without a finite mean (Lévy) gives exactly zero. When no
/// balancing `α` exists the exponent is infinite.
pub fn linear_diversity<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
) -> Result<Linear, DiversityError> {
    linear_diversity_with(density, delta, &Tolerances::default())
}

pub fn linear_diversity_with<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    tol: &Tolerances,
) -> Result<Linear, DiversityError> {
    check_delta(delta)?;
    let Some(cgf) = density.cgf_spec() else {
        return Ok(Linear {
            d_lin: Exponent::Finite(0.0),
            alpha: None,
            diagnostics: None,
        });
    };
    let mean = cgf.mean;
    let rate = |v: f64| rate_function(density, v).map(RateValue::as_f64);

    let failure = std::cell::Cell::new(None);
    let balance = |alpha: f64| match (rate(mean + alpha), rate(mean - delta + alpha)) {
        (Ok(right), Ok(left)) => right - left,
        (Err(e), _) | (_, Err(e)) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let lo = (delta - mean).max(0.0);
    let pad = 1e-12 * delta.max(1.0);
    let bracket = Interval::new(lo + pad, delta - pad).map_err(numerics("linear balance bracket"))?;
    let root = find_root(balance, bracket, tol.root);
    if let Some(e) = failure.take() {
        return Err(numerics("rate function")(e));
    }
    match root {
        Ok(r) => {
            let d = rate(mean + r.x).map_err(numerics("rate function"))?;
            let d_lin = if d.is_finite() {
                Exponent::Finite(d)
            } else {
                Exponent::Infinite
            };
            Ok(Linear {
                d_lin,
                alpha: Some(r.x),
                diagnostics: Some(r.diagnostics),
            })
        }
        Err(NumericsError::NoRoot { .. }) => Ok(Linear {
            d_lin: Exponent::Infinite,
            alpha: None,
            diagnostics: None,
        }),
        Err(e) => Err(numerics("linear balance")(e)),
    }
}

/// Computes every exponent for `(density, delta)`.
pub fn diversity_report<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
) -> Result<DiversityReport, DiversityError> {
    diversity_report_with(density, delta, &Tolerances::default())
}

pub fn diversity_report_with<D: NoiseDensity + ?Sized>(
    density: &D,
    delta: f64,
    tol: &Tolerances,
) -> Result<DiversityReport, DiversityError> {
    let ml = chernoff_diversity_with(density, delta, tol)?;
    let lin = linear_diversity_with(density, delta, tol)?;
    let d_fa = fa_diversity(density, delta)?;
    Ok(DiversityReport {
        delta,
        d_ml: ml.d_ml,
        d_fa,
        d_lin: lin.d_lin,
        s_star: ml.s_star,
        alpha: lin.alpha,
        ml_diagnostics: ml.diagnostics,
        lin_diagnostics: lin.diagnostics,
    })
}

#[cfg(test)]
mod tests;
