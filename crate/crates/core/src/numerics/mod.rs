//! Real-analysis kernel: adaptive quadrature, bracketed root finding,
//! bounded 1-D minimization and a numerical Legendre transform.
//!
//! Everything here is a pure function of its inputs.

mod legendre;
mod minimize;
mod quadrature;
mod roots;

pub use legendre::{legendre_transform, LambdaRange, RateValue};
pub use minimize::{minimize_1d, Minimum};
pub use quadrature::{integrate, integrate_with, QuadratureOptions};
pub use roots::{find_root, Root};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance for quadrature.
pub const QUAD_REL_TOL: f64 = 1e-9;
/// Default bracket width for root finding.
pub const ROOT_TOL: f64 = 1e-10;
/// Default tolerance for golden-section minimization.
pub const MIN_TOL: f64 = 1e-8;

/// Solver tolerances used by the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative accuracy of every integral.
    pub quad_rel: f64,
    /// Bracket width at which root finding stops.
    pub root: f64,
    /// Golden-section stopping width.
    pub min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: QUAD_REL_TOL,
            root: ROOT_TOL,
            min: MIN_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.quad_rel > 0.0 && self.quad_rel <= 1e-2) {
            return Err(NumericsError::InvalidTolerance(self.quad_rel));
        }
        for t in [self.root, self.min] {
            if !(t > 0.0 && t < 1.0) {
                return Err(NumericsError::InvalidTolerance(t));
            }
        }
        Ok(())
    }
}

/// Integration or search domain `[lo, hi]`; `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if !lo.is_finite() || hi.is_nan() || hi == f64::NEG_INFINITY || lo >= hi {
            return Err(NumericsError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, +inf)`.
    pub fn half_line(lo: f64) -> Result<Self, NumericsError> {
        Self::new(lo, f64::INFINITY)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Convergence record attached to iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("quadrature did not converge after {subintervals} subintervals (estimate {estimate}, error {error})")]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        subintervals: usize,
    },
    #[error("no sign change on [{lo}, {hi}]: h(lo) = {f_lo}, h(hi) = {f_hi}")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function returned NaN at x = {x}")]
    NotANumber { x: f64 },
    #[error("cumulant generating function is not available")]
    Unsupported,
}
