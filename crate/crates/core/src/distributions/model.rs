use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::special::{erf, erfc, ln_std_normal_cdf, std_normal_cdf};
use super::{NoiseDensity, ParseNoiseError};
use crate::numerics::{Interval, LambdaRange};

/// Shape class of a unimodal density on the positive half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnimodalClass {
    /// Mode at the left edge of the support.
    ZeroMode,
    /// Positive mode and a positive density limit at the left edge.
    PositiveModePositiveLimit,
    /// Positive mode and a vanishing density at the left edge.
    PositiveModeZeroLimit,
}

impl fmt::Display for UnimodalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UnimodalClass::ZeroMode => "ZeroMode",
            UnimodalClass::PositiveModePositiveLimit => "PositiveModePositiveLimit",
            UnimodalClass::PositiveModeZeroLimit => "PositiveModeZeroLimit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeInfo {
    /// Location of the density maximum.
    pub mode: f64,
    /// `lim f(z)` as `z` approaches the left edge from inside.
    pub density_at_zero_limit: f64,
    pub unimodal_class: UnimodalClass,
}

/// Closed-form cumulant generating functions of the families that have one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CgfKind {
    Uniform { b: f64 },
    Exponential { b: f64 },
    InverseGaussian { mu: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgfSpec {
    pub kind: CgfKind,
    pub domain: LambdaRange,
    pub mean: f64,
    pub variance: f64,
}

impl CgfSpec {
    /// `Λ(λ) = ln E[e^{λZ}]`; `+inf` outside the domain.
    pub fn eval(&self, lambda: f64) -> f64 {
        if !self.domain.contains(lambda) {
            return f64::INFINITY;
        }
        match self.kind {
            CgfKind::Exponential { b } => -(-lambda / b).ln_1p(),
            CgfKind::InverseGaussian { mu, b } => {
                (b / mu) * (1.0 - (1.0 - 2.0 * mu * mu * lambda / b).max(0.0).sqrt())
            }
            CgfKind::Uniform { b } => {
                let x = lambda * b;
                if x.abs() < 1e-5 {
                    x / 2.0 + x * x / 24.0
                } else if x > 0.0 {
                    // ln((e^x - 1)/x) = x + ln(1 - e^{-x}) - ln x
                    x + (-(-x).exp_m1()).ln() - x.ln()
                } else {
                    (-x.exp_m1()).ln() - (-x).ln()
                }
            }
        }
    }
}

/// Propagation-delay law of a single particle.
///
/// Parameters: `Uniform(0, b)`, `Exponential` with rate `b`,
/// `InverseGaussian` with mean `mu` and shape `b`, `Levy` with location
/// `mu` and scale `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Uniform { b: f64 },
    Exponential { b: f64 },
    InverseGaussian { mu: f64, b: f64 },
    Levy { mu: f64, b: f64 },
}

impl NoiseModel {
    pub fn uniform(b: f64) -> Result<Self, ParseNoiseError> {
        Self::Uniform { b }.validated()
    }

    pub fn exponential(b: f64) -> Result<Self, ParseNoiseError> {
        Self::Exponential { b }.validated()
    }

    pub fn inverse_gaussian(mu: f64, b: f64) -> Result<Self, ParseNoiseError> {
        Self::InverseGaussian { mu, b }.validated()
    }

    pub fn levy(mu: f64, b: f64) -> Result<Self, ParseNoiseError> {
        Self::Levy { mu, b }.validated()
    }

    fn validated(self) -> Result<Self, ParseNoiseError> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ParseNoiseError::InvalidParameter { name, value: v })
            }
        };
        match self {
            NoiseModel::Uniform { b } | NoiseModel::Exponential { b } => positive("b", b)?,
            NoiseModel::InverseGaussian { mu, b } => {
                positive("mu", mu)?;
                positive("b", b)?;
            }
            NoiseModel::Levy { mu, b } => {
                if !(mu.is_finite() && mu >= 0.0) {
                    return Err(ParseNoiseError::InvalidParameter { name: "mu", value: mu });
                }
                positive("b", b)?;
            }
        }
        Ok(self)
    }

    pub fn family(&self) -> &'static str {
        match self {
            NoiseModel::Uniform { .. } => "uniform",
            NoiseModel::Exponential { .. } => "exp",
            NoiseModel::InverseGaussian { .. } => "ig",
            NoiseModel::Levy { .. } => "levy",
        }
    }

    /// `E[Z]`, `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            NoiseModel::Uniform { b } => Some(b / 2.0),
            NoiseModel::Exponential { b } => Some(1.0 / b),
            NoiseModel::InverseGaussian { mu, .. } => Some(mu),
            NoiseModel::Levy { .. } => None,
        }
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// One draw of `Z`.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Uniform { b } => b * open_unit(rng),
            NoiseModel::Exponential { b } => -open_unit(rng).ln() / b,
            NoiseModel::InverseGaussian { mu, b } => sample_ig(mu, b, rng),
            NoiseModel::Levy { mu, b } => sample_levy(mu, b, rng),
        }
    }

    /// Fills `out` with i.i.d. draws.
    pub fn fill<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) {
        match *self {
            NoiseModel::Uniform { b } => out.iter_mut().for_each(|z| *z = b * open_unit(rng)),
            NoiseModel::Exponential { b } => {
                out.iter_mut().for_each(|z| *z = -open_unit(rng).ln() / b)
            }
            NoiseModel::InverseGaussian { mu, b } => {
                out.iter_mut().for_each(|z| *z = sample_ig(mu, b, rng))
            }
            NoiseModel::Levy { mu, b } => out.iter_mut().for_each(|z| *z = sample_levy(mu, b, rng)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.fill(&mut out, rng);
        out
    }

    fn ig_cdf_terms(mu: f64, b: f64, z: f64) -> (f64, f64) {
        let r = (b / z).sqrt();
        (r * (z / mu - 1.0), r * (z / mu + 1.0))
    }
}

/// Uniform on the open interval (0, 1).
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

// Transformation with multiple roots: one normal and one uniform per draw.
fn sample_ig<R: Rng + ?Sized>(mu: f64, b: f64, rng: &mut R) -> f64 {
    let nu: f64 = rng.sample(StandardNormal);
    let y = nu * nu;
    let my = mu * y;
    // Larger root first; the smaller one is mu^2 / larger, which avoids
    // cancellation.
    let big = mu + mu * my / (2.0 * b) + (mu / (2.0 * b)) * (4.0 * b * my + my * my).sqrt();
    let x = mu * mu / big;
    if open_unit(rng) <= mu / (mu + x) {
        x
    } else {
        big
    }
}

fn sample_levy<R: Rng + ?Sized>(mu: f64, b: f64, rng: &mut R) -> f64 {
    loop {
        let g: f64 = rng.sample(StandardNormal);
        if g != 0.0 {
            return mu + b / (g * g);
        }
    }
}

impl NoiseDensity for NoiseModel {
    fn pdf(&self, z: f64) -> f64 {
        match *self {
            NoiseModel::Uniform { b } => {
                if (0.0..=b).contains(&z) {
                    1.0 / b
                } else {
                    0.0
                }
            }
            NoiseModel::Exponential { b } => {
                if z >= 0.0 {
                    b * (-b * z).exp()
                } else {
                    0.0
                }
            }
            _ => self.log_pdf(z).exp(),
        }
    }

    fn log_pdf(&self, z: f64) -> f64 {
        match *self {
            NoiseModel::Uniform { b } => {
                if (0.0..=b).contains(&z) {
                    -b.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            NoiseModel::Exponential { b } => {
                if z >= 0.0 {
                    b.ln() - b * z
                } else {
                    f64::NEG_INFINITY
                }
            }
            NoiseModel::InverseGaussian { mu, b } => {
                if z <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                0.5 * (b / (2.0 * PI)).ln() - 1.5 * z.ln() - b * (z - mu).powi(2) / (2.0 * mu * mu * z)
            }
            NoiseModel::Levy { mu, b } => {
                let x = z - mu;
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                0.5 * (b / (2.0 * PI)).ln() - 1.5 * x.ln() - b / (2.0 * x)
            }
        }
    }

    fn d_log_pdf(&self, z: f64) -> f64 {
        match *self {
            NoiseModel::Uniform { .. } => 0.0,
            NoiseModel::Exponential { b } => -b,
            NoiseModel::InverseGaussian { mu, b } => {
                -1.5 / z - b * (1.0 - mu * mu / (z * z)) / (2.0 * mu * mu)
            }
            NoiseModel::Levy { mu, b } => {
                let x = z - mu;
                -1.5 / x + b / (2.0 * x * x)
            }
        }
    }

    fn cdf(&self, z: f64) -> f64 {
        match *self {
            NoiseModel::Uniform { b } => (z / b).clamp(0.0, 1.0),
            NoiseModel::Exponential { b } => {
                if z <= 0.0 {
                    0.0
                } else {
                    -(-b * z).exp_m1()
                }
            }
            NoiseModel::InverseGaussian { mu, b } => {
                if z <= 0.0 {
                    return 0.0;
                }
                let (a, c) = Self::ig_cdf_terms(mu, b, z);
                // exp(2b/mu) Φ(-c) evaluated in log space.
                let second = (2.0 * b / mu + ln_std_normal_cdf(-c)).exp();
                (std_normal_cdf(a) + second).min(1.0)
            }
            NoiseModel::Levy { mu, b } => {
                let x = z - mu;
                if x <= 0.0 {
                    0.0
                } else {
                    erfc((b / (2.0 * x)).sqrt())
                }
            }
        }
    }

    fn sf(&self, z: f64) -> f64 {
        match *self {
            NoiseModel::Uniform { b } => 1.0 - (z / b).clamp(0.0, 1.0),
            NoiseModel::Exponential { b } => {
                if z <= 0.0 {
                    1.0
                } else {
                    (-b * z).exp()
                }
            }
            NoiseModel::InverseGaussian { mu, b } => {
                if z <= 0.0 {
                    return 1.0;
                }
                let cdf = self.cdf(z);
                if cdf < 0.5 {
                    return 1.0 - cdf;
                }
                let (a, c) = Self::ig_cdf_terms(mu, b, z);
                let second = (2.0 * b / mu + ln_std_normal_cdf(-c)).exp();
                (std_normal_cdf(-a) - second).max(0.0)
            }
            NoiseModel::Levy { mu, b } => {
                let x = z - mu;
                if x <= 0.0 {
                    1.0
                } else {
                    erf((b / (2.0 * x)).sqrt())
                }
            }
        }
    }

    fn log_sf(&self, z: f64) -> f64 {
        match *self {
            NoiseModel::Exponential { b } => {
                if z <= 0.0 {
                    0.0
                } else {
                    -b * z
                }
            }
            _ => {
                let cdf = self.cdf(z);
                if cdf < 0.5 {
                    (-cdf).ln_1p()
                } else {
                    self.sf(z).ln()
                }
            }
        }
    }

    fn support(&self) -> Interval {
        let (lo, hi) = match *self {
            NoiseModel::Uniform { b } => (0.0, b),
            NoiseModel::Exponential { .. } | NoiseModel::InverseGaussian { .. } => (0.0, f64::INFINITY),
            NoiseModel::Levy { mu, .. } => (mu, f64::INFINITY),
        };
        Interval::new(lo, hi).expect("validated parameters give a non-empty support")
    }

    fn mode_info(&self) -> ModeInfo {
        match *self {
            NoiseModel::Uniform { b } => ModeInfo {
                mode: 0.0,
                density_at_zero_limit: 1.0 / b,
                unimodal_class: UnimodalClass::ZeroMode,
            },
            NoiseModel::Exponential { b } => ModeInfo {
                mode: 0.0,
                density_at_zero_limit: b,
                unimodal_class: UnimodalClass::ZeroMode,
            },
            NoiseModel::InverseGaussian { mu, b } => ModeInfo {
                mode: mu * ((1.0 + 9.0 * mu * mu / (4.0 * b * b)).sqrt() - 1.5 * mu / b),
                density_at_zero_limit: 0.0,
                unimodal_class: UnimodalClass::PositiveModeZeroLimit,
            },
            NoiseModel::Levy { mu, b } => ModeInfo {
                mode: mu + b / 3.0,
                density_at_zero_limit: 0.0,
                unimodal_class: UnimodalClass::PositiveModeZeroLimit,
            },
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        match *self {
            NoiseModel::Uniform { b } => b * p.clamp(0.0, 1.0),
            NoiseModel::Exponential { b } => -(-p.clamp(0.0, 1.0)).ln_1p() / b,
            _ => super::numeric_quantile(self, p),
        }
    }

    fn cgf_spec(&self) -> Option<CgfSpec> {
        match *self {
            NoiseModel::Uniform { b } => Some(CgfSpec {
                kind: CgfKind::Uniform { b },
                domain: LambdaRange::real_line(),
                mean: b / 2.0,
                variance: b * b / 12.0,
            }),
            NoiseModel::Exponential { b } => Some(CgfSpec {
                kind: CgfKind::Exponential { b },
                domain: LambdaRange::below(b, false),
                mean: 1.0 / b,
                variance: 1.0 / (b * b),
            }),
            NoiseModel::InverseGaussian { mu, b } => Some(CgfSpec {
                kind: CgfKind::InverseGaussian { mu, b },
                domain: LambdaRange::below(b / (2.0 * mu * mu), true),
                mean: mu,
                variance: mu.powi(3) / b,
            }),
            NoiseModel::Levy { .. } => None,
        }
    }
}
