use serde::{Deserialize, Serialize};

use super::{check_delta, numerics, DiversityError, Exponent};
use crate::distributions::special::{erfc, std_normal_cdf};
use crate::distributions::NoiseModel;
use crate::numerics::{find_root, Interval, NumericsError, RateValue, ROOT_TOL};

/// Exponents available from family-specific formulas. Used as oracles
/// for the generic numerical routes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedForms {
    pub d_ml: Option<Exponent>,
    pub d_fa: Option<Exponent>,
    pub d_lin: Option<Exponent>,
    pub alpha: Option<f64>,
}

/// Closed-form rate function for the exponential and inverse-Gaussian
/// families.
pub fn closed_form_rate(noise: &NoiseModel, v: f64) -> Option<RateValue> {
    match *noise {
        NoiseModel::Exponential { b } => Some(if v > 0.0 {
            RateValue::Finite(b * v - 1.0 - (b * v).ln())
        } else {
            RateValue::Infinite
        }),
        NoiseModel::InverseGaussian { mu, b } => Some(if v > 0.0 {
            RateValue::Finite(b * (v - mu).powi(2) / (2.0 * mu * mu * v))
        } else {
            RateValue::Infinite
        }),
        _ => None,
    }
}

pub fn closed_form_diversity(noise: &NoiseModel, delta: f64) -> Result<ClosedForms, DiversityError> {
    check_delta(delta)?;
    let forms = match *noise {
        NoiseModel::Uniform { b } => {
            let d = if delta < b {
                Exponent::Finite((b / (b - delta)).ln())
            } else {
                Exponent::Infinite
            };
            ClosedForms {
                d_ml: Some(d),
                d_fa: Some(d),
                ..ClosedForms::default()
            }
        }
        NoiseModel::Exponential { b } => {
            let x = b * delta;
            let e = x.exp();
            let alpha = (1.0 - e * (1.0 - x)) / ((e - 1.0) * b);
            let d_lin = (1.0 + e * (x - 1.0) - (e - 1.0) * (x * e / (e - 1.0)).ln()) / (e - 1.0);
            ClosedForms {
                d_ml: Some(Exponent::Finite(x)),
                d_fa: Some(Exponent::Finite(x)),
                d_lin: Some(Exponent::Finite(d_lin)),
                alpha: Some(alpha),
            }
        }
        NoiseModel::InverseGaussian { mu, b } => {
            let r = (b / delta).sqrt();
            let tail = 1.0 - std_normal_cdf(r * (delta / mu - 1.0))
                - (2.0 * b / mu).exp() * std_normal_cdf(-r * (delta / mu + 1.0));
            let (d_lin, alpha) = ig_linear(noise, mu, delta)?;
            ClosedForms {
                d_ml: None,
                d_fa: Some(Exponent::Finite(-tail.ln())),
                d_lin: Some(d_lin),
                alpha,
            }
        }
        NoiseModel::Levy { b, .. } => ClosedForms {
            d_ml: None,
            d_fa: Some(Exponent::Finite(-(1.0 - erfc((b / (2.0 * delta)).sqrt())).ln())),
            d_lin: Some(Exponent::Finite(0.0)),
            alpha: None,
        },
    };
    Ok(forms)
}

/// Balances the closed-form inverse-Gaussian rate function.
fn ig_linear(noise: &NoiseModel, mu: f64, delta: f64) -> Result<(Exponent, Option<f64>), DiversityError> {
    let rate = |v: f64| closed_form_rate(noise, v).map_or(f64::INFINITY, RateValue::as_f64);
    let lo = (delta - mu).max(0.0);
    let pad = 1e-12 * delta.max(1.0);
    let bracket = Interval::new(lo + pad, delta - pad).map_err(numerics("closed-form balance"))?;
    match find_root(|a| rate(mu + a) - rate(mu - delta + a), bracket, ROOT_TOL) {
        Ok(r) => Ok((Exponent::Finite(rate(mu + r.x)), Some(r.x))),
        Err(NumericsError::NoRoot { .. }) => Ok((Exponent::Infinite, None)),
        Err(e) => Err(numerics("closed-form balance")(e)),
    }
}
