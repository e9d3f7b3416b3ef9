//! Decision rules: maximum likelihood over all arrivals, a threshold on
//! the sample mean, and a threshold on the first arrival.

mod constellation;

pub use constellation::{Constellation, ConstellationError};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{NoiseDensity, NoiseModel};
use crate::diversity::{fa_threshold, linear_diversity, DiversityError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Ml,
    #[serde(rename = "lin")]
    Linear,
    Fa,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [DetectorKind::Ml, DetectorKind::Linear, DetectorKind::Fa];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::Ml => "ml",
            DetectorKind::Linear => "lin",
            DetectorKind::Fa => "fa",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = DetectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ml" => Ok(DetectorKind::Ml),
            "lin" | "linear" => Ok(DetectorKind::Linear),
            "fa" => Ok(DetectorKind::Fa),
            other => Err(DetectorError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectorError {
    #[error("unknown detector `{0}` (expected ml, lin or fa)")]
    UnknownKind(String),
    #[error("detector is {actual}, not {expected}")]
    WrongKind { expected: DetectorKind, actual: DetectorKind },
    #[error("no first-arrival thresholds prepared for M = {0}")]
    MissingThreshold(usize),
    #[error("thresholds are not increasing across the constellation: {0:?}")]
    NonMonotoneThresholds(Vec<f64>),
    #[error("expected {expected} linear thresholds, got {actual}")]
    ThresholdCount { expected: usize, actual: usize },
    #[error("empty arrival set")]
    NoArrivals,
    #[error(transparent)]
    Diversity(#[from] DiversityError),
}

/// How the sample-mean detector places its thresholds when the noise
/// has no finite mean.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum LinearFallback {
    /// `ξ_l + median(Z) + Δ_l / 2` for each adjacent pair.
    #[default]
    MidpointOfMedians,
    /// Absolute thresholds, one per adjacent pair.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
enum Thresholds {
    None,
    Linear { cuts: Vec<f64>, fallback: bool },
    FirstArrival { by_m: BTreeMap<usize, Vec<f64>> },
}

/// A detector bound to a noise law and constellation, with its
/// thresholds precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    kind: DetectorKind,
    noise: NoiseModel,
    constellation: Constellation,
    thresholds: Thresholds,
}

fn ensure_increasing(cuts: Vec<f64>) -> Result<Vec<f64>, DetectorError> {
    if cuts.windows(2).all(|w| w[0] < w[1]) && cuts.iter().all(|c| c.is_finite()) {
        Ok(cuts)
    } else {
        Err(DetectorError::NonMonotoneThresholds(cuts))
    }
}

impl DetectorSpec {
    pub fn ml(noise: NoiseModel, constellation: Constellation) -> Self {
        Self {
            kind: DetectorKind::Ml,
            noise,
            constellation,
            thresholds: Thresholds::None,
        }
    }

    /// Sample-mean detector with thresholds `ξ_l + E[Z] + α_l`, where
    /// `α_l` balances the two large-deviation tails for gap `Δ_l`.
    ///
    /// Falls back to `fallback` when the noise mean is infinite. Gaps
    /// with disjoint sample-mean ranges use `α = Δ_l / 2`.
    pub fn linear(
        noise: NoiseModel,
        constellation: Constellation,
        fallback: &LinearFallback,
    ) -> Result<Self, DetectorError> {
        let pairs = constellation.len() - 1;
        let (cuts, used_fallback) = match noise.mean() {
            Some(mean) => {
                let mut cuts = Vec::with_capacity(pairs);
                let mut any_fallback = false;
                for (xi, gap) in constellation.pairs() {
                    let lin = linear_diversity(&noise, gap)?;
                    let alpha = lin.alpha.unwrap_or_else(|| {
                        any_fallback = true;
                        gap / 2.0
                    });
                    cuts.push(xi + mean + alpha);
                }
                (cuts, any_fallback)
            }
            None => match fallback {
                LinearFallback::MidpointOfMedians => {
                    let median = noise.median();
                    let cuts = constellation
                        .pairs()
                        .map(|(xi, gap)| xi + median + gap / 2.0)
                        .collect();
                    (cuts, true)
                }
                LinearFallback::Explicit(cuts) => {
                    if cuts.len() != pairs {
                        return Err(DetectorError::ThresholdCount {
                            expected: pairs,
                            actual: cuts.len(),
                        });
                    }
                    (cuts.clone(), true)
                }
            },
        };
        Ok(Self {
            kind: DetectorKind::Linear,
            noise,
            constellation,
            thresholds: Thresholds::Linear {
                cuts: ensure_increasing(cuts)?,
                fallback: used_fallback,
            },
        })
    }

    /// First-arrival detector with thresholds prepared for every `M` in
    /// `m_values`.
    pub fn first_arrival(
        noise: NoiseModel,
        constellation: Constellation,
        m_values: &[usize],
    ) -> Result<Self, DetectorError> {
        let mut by_m = BTreeMap::new();
        for &m in m_values {
            let cuts = constellation
                .pairs()
                .map(|(xi, gap)| fa_threshold(&noise, gap, m).map(|t| xi + t.theta))
                .collect::<Result<Vec<_>, _>>()?;
            by_m.insert(m, ensure_increasing(cuts)?);
        }
        Ok(Self {
            kind: DetectorKind::Fa,
            noise,
            constellation,
            thresholds: Thresholds::FirstArrival { by_m },
        })
    }

    pub fn kind(&self) -> DetectorKind {
        self.kind
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Linear thresholds, and whether they came from a fallback rule.
    pub fn linear_thresholds(&self) -> Option<(&[f64], bool)> {
        match &self.thresholds {
            Thresholds::Linear { cuts, fallback } => Some((cuts, *fallback)),
            _ => None,
        }
    }

    pub fn fa_thresholds(&self, m: usize) -> Option<&[f64]> {
        match &self.thresholds {
            Thresholds::FirstArrival { by_m } => by_m.get(&m).map(Vec::as_slice),
            _ => None,
        }
    }

    fn expect(&self, kind: DetectorKind) -> Result<(), DetectorError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(DetectorError::WrongKind {
                expected: kind,
                actual: self.kind,
            })
        }
    }

    /// Index of the decided constellation point.
    pub fn decide_index(&self, arrivals: &[f64]) -> Result<usize, DetectorError> {
        if arrivals.is_empty() {
            return Err(DetectorError::NoArrivals);
        }
        match &self.thresholds {
            Thresholds::None => Ok(ml_index(&self.noise, self.constellation.points(), arrivals)),
            Thresholds::Linear { cuts, .. } => Ok(linear_index(cuts, mean(arrivals))),
            Thresholds::FirstArrival { by_m } => {
                let cuts = by_m
                    .get(&arrivals.len())
                    .ok_or(DetectorError::MissingThreshold(arrivals.len()))?;
                Ok(fa_index(cuts, first_arrival(arrivals)))
            }
        }
    }

    /// Decided release time.
    pub fn decide(&self, arrivals: &[f64]) -> Result<f64, DetectorError> {
        self.decide_index(arrivals).map(|i| self.constellation.points()[i])
    }
}

/// Maximum-likelihood release time.
pub fn decide_ml(spec: &DetectorSpec, arrivals: &[f64]) -> Result<f64, DetectorError> {
    spec.expect(DetectorKind::Ml)?;
    spec.decide(arrivals)
}

/// Sample-mean release time.
pub fn decide_linear(spec: &DetectorSpec, arrivals: &[f64]) -> Result<f64, DetectorError> {
    spec.expect(DetectorKind::Linear)?;
    spec.decide(arrivals)
}

/// First-arrival release time for `m` particles.
pub fn decide_fa(spec: &DetectorSpec, arrivals: &[f64], m: usize) -> Result<f64, DetectorError> {
    spec.expect(DetectorKind::Fa)?;
    if arrivals.is_empty() {
        return Err(DetectorError::NoArrivals);
    }
    let cuts = spec.fa_thresholds(m).ok_or(DetectorError::MissingThreshold(m))?;
    Ok(spec.constellation.points()[fa_index(cuts, first_arrival(arrivals))])
}

pub fn mean(arrivals: &[f64]) -> f64 {
    arrivals.iter().sum::<f64>() / arrivals.len() as f64
}

pub fn first_arrival(arrivals: &[f64]) -> f64 {
    arrivals.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Log-likelihood of `arrivals` under release time `xi`. Arrivals before
/// `xi` make it `-inf`, which stays `-inf` under addition.
pub fn log_likelihood<D: NoiseDensity + ?Sized>(noise: &D, xi: f64, arrivals: &[f64]) -> f64 {
    let mut total = 0.0;
    for &y in arrivals {
        total += noise.log_pdf(y - xi);
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    total
}

/// Argmax of the log-likelihood over `points`. Equal likelihoods go to
/// the later point.
pub fn ml_index<D: NoiseDensity + ?Sized>(noise: &D, points: &[f64], arrivals: &[f64]) -> usize {
    let mut best = 0;
    let mut best_ll = f64::NEG_INFINITY;
    for (i, &xi) in points.iter().enumerate() {
        let ll = log_likelihood(noise, xi, arrivals);
        if ll >= best_ll {
            best = i;
            best_ll = ll;
        }
    }
    best
}

/// Counts thresholds strictly below the statistic: a tie stays with the
/// earlier point.
pub fn linear_index(cuts: &[f64], statistic: f64) -> usize {
    cuts.partition_point(|&c| c < statistic)
}

/// Counts thresholds at or below the first arrival: a tie goes to the
/// later point.
pub fn fa_index(cuts: &[f64], y_fa: f64) -> usize {
    cuts.partition_point(|&c| c <= y_fa)
}

#[cfg(test)]
mod tests;
