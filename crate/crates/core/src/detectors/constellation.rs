use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstellationError {
    #[error("a constellation needs at least two points")]
    TooFewPoints,
    #[error("constellation points must be finite, non-negative and strictly increasing: {0:?}")]
    Unordered(Vec<f64>),
}

/// Release times `ξ_0 < ξ_1 < … < ξ_{L-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Constellation {
    points: Vec<f64>,
}

impl Constellation {
    pub fn new(points: Vec<f64>) -> Result<Self, ConstellationError> {
        if points.len() < 2 {
            return Err(ConstellationError::TooFewPoints);
        }
        let ordered = points.windows(2).all(|w| w[0] < w[1]);
        if !ordered || points.iter().any(|p| !p.is_finite()) || points[0] < 0.0 {
            return Err(ConstellationError::Unordered(points));
        }
        Ok(Self { points })
    }

    /// `{0, Δ}`.
    pub fn binary(delta: f64) -> Result<Self, ConstellationError> {
        Self::new(vec![0.0, delta])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The largest release time.
    pub fn delta(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Adjacent pairs as `(ξ_l, ξ_{l+1} - ξ_l)`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1] - w[0]))
    }

    /// The same constellation shifted right by `s`.
    pub fn shifted(&self, s: f64) -> Result<Self, ConstellationError> {
        Self::new(self.points.iter().map(|p| p + s).collect())
    }
}

impl TryFrom<Vec<f64>> for Constellation {
    type Error = ConstellationError;

    fn try_from(points: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(points)
    }
}

impl From<Constellation> for Vec<f64> {
    fn from(c: Constellation) -> Self {
        c.points
    }
}
