//! Parametric propagation-delay families.
//!
//! Each family exposes closed-form density, distribution and log-density
//! functions, its mode, a sampler and (where it exists) its cumulant
//! generating function.

mod model;
mod parse;
pub mod special;

pub use model::{CgfKind, CgfSpec, ModeInfo, NoiseModel, UnimodalClass};
pub use parse::ParseNoiseError;

use crate::numerics::{find_root, Interval, NumericsError, RateValue};

/// Density-level view of a noise law.
///
/// [`NoiseModel`] is the production implementation; the analytic engine
/// is written against this trait so other unimodal laws can be plugged in.
pub trait NoiseDensity: Sync {
    fn pdf(&self, z: f64) -> f64;

    /// `ln f(z)`; `-inf` outside the support.
    fn log_pdf(&self, z: f64) -> f64 {
        self.pdf(z).ln()
    }

    /// `d/dz ln f(z)` on the open support interior.
    fn d_log_pdf(&self, z: f64) -> f64;

    fn cdf(&self, z: f64) -> f64;

    /// `1 - F(z)`.
    fn sf(&self, z: f64) -> f64 {
        1.0 - self.cdf(z)
    }

    fn log_sf(&self, z: f64) -> f64 {
        self.sf(z).ln()
    }

    fn support(&self) -> Interval;

    fn mode_info(&self) -> ModeInfo;

    /// Inverse cdf, by bracketed root finding unless overridden.
    fn quantile(&self, p: f64) -> f64 {
        numeric_quantile(self, p)
    }

    fn cgf_spec(&self) -> Option<CgfSpec> {
        None
    }
}

/// Result of [`lemma1_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Ratio {
    /// `f'(z) / f(z)^2`, or `±inf` when saturated.
    pub value: f64,
    /// The density underflowed or the quotient overflowed.
    pub saturated: bool,
}

/// `f'(z) / f(z)^2`, computed as `(d/dz ln f) / f`.
///
/// Only meaningful on the open support interior.
pub fn lemma1_ratio<D: NoiseDensity + ?Sized>(density: &D, z: f64) -> Lemma1Ratio {
    let slope = density.d_log_pdf(z);
    if slope == 0.0 {
        return Lemma1Ratio {
            value: 0.0,
            saturated: false,
        };
    }
    let value = slope / density.pdf(z);
    if value.is_finite() {
        Lemma1Ratio {
            value,
            saturated: false,
        }
    } else {
        Lemma1Ratio {
            value: f64::INFINITY.copysign(slope),
            saturated: true,
        }
    }
}

/// Cramér rate function `Λ*(v)` evaluated numerically from the CGF.
pub fn rate_function<D: NoiseDensity + ?Sized>(density: &D, v: f64) -> Result<RateValue, NumericsError> {
    let spec = density.cgf_spec().ok_or(NumericsError::Unsupported)?;
    crate::numerics::legendre_transform(|l| spec.eval(l), spec.domain, v)
}

fn numeric_quantile<D: NoiseDensity + ?Sized>(density: &D, p: f64) -> f64 {
    if p.is_nan() || p <= 0.0 {
        return density.support().lo();
    }
    if p >= 1.0 {
        return density.support().hi();
    }
    let support = density.support();
    let lo = support.lo();
    let mut hi = if support.is_bounded() {
        support.hi()
    } else {
        lo + 1.0
    };
    while density.cdf(hi) < p && hi.is_finite() {
        hi = lo + 2.0 * (hi - lo);
    }
    let bracket = match Interval::new(lo, hi) {
        Ok(b) => b,
        Err(_) => return lo,
    };
    find_root(|z| density.cdf(z) - p, bracket, 1e-13 * hi.abs().max(1.0))
        .map(|r| r.x)
        .unwrap_or(f64::NAN)
}
