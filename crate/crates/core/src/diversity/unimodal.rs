use serde::{Deserialize, Serialize};

use crate::distributions::{lemma1_ratio, NoiseDensity, UnimodalClass};
use crate::numerics::{minimize_1d, Interval};

const MONOTONE_GRID: usize = 512;
const SEARCH_GRID: usize = 4000;
const TAIL_QUANTILE: f64 = 0.9999;

/// Certificate that the first-arrival density is unimodal for `M > m0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnimodalityReport {
    pub class: UnimodalClass,
    /// Upper end of the window on which `f'/f²` must decrease.
    pub epsilon: f64,
    /// Maximiser of `f'(1-F)/f²` beyond `epsilon`.
    pub xi: f64,
    pub m0: usize,
    pub certified: bool,
    /// First grid point where `f'/f²` increased, if any.
    pub violation: Option<f64>,
}

/// `f'(z) (1 - F(z)) / f(z)^2`.
fn stationarity_ratio<D: NoiseDensity + ?Sized>(density: &D, z: f64) -> f64 {
    let r = lemma1_ratio(density, z);
    if r.value == 0.0 {
        0.0
    } else {
        r.value * density.sf(z)
    }
}

/// Maximises the stationarity ratio over `[lo, hi]` by a grid scan and a
/// golden-section polish around the best grid point.
fn maximise_ratio<D: NoiseDensity + ?Sized>(density: &D, lo: f64, hi: f64) -> (f64, f64) {
    let step = (hi - lo) / SEARCH_GRID as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=SEARCH_GRID {
        let z = lo + step * i as f64;
        let v = stationarity_ratio(density, z);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let mut xi = lo + step * best_i as f64;
    if let Ok(domain) = Interval::new(a, b) {
        if let Ok(m) = minimize_1d(|z| -stationarity_ratio(density, z), domain, 1e-12 * hi.max(1.0)) {
            if -m.min > best {
                best = -m.min;
                xi = m.argmin;
            }
        }
    }
    (xi, best)
}

fn m0_from(max_ratio: f64) -> usize {
    max_ratio.max(0.0).ceil() as usize + 1
}

/// Classifies the noise and finds `M0` beyond which the first-arrival
/// density is unimodal.
///
/// Zero-mode noise is unimodal for every `M`. With a positive mode and a
/// positive density at the edge, `M0` bounds the stationarity ratio below
/// the mode. With a vanishing edge density, `f'/f²` must decrease on
/// `(0, ε]` with `ε` half the mode; `M0` then comes from the largest ratio
/// beyond `ε`.
pub fn unimodality_certificate<D: NoiseDensity + ?Sized>(density: &D) -> UnimodalityReport {
    let info = density.mode_info();
    let edge = density.support().lo();
    match info.unimodal_class {
        UnimodalClass::ZeroMode => UnimodalityReport {
            class: info.unimodal_class,
            epsilon: edge,
            xi: edge,
            m0: 1,
            certified: true,
            violation: None,
        },
        UnimodalClass::PositiveModePositiveLimit => {
            let lo = edge + 1e-9 * (info.mode - edge);
            let (xi, best) = maximise_ratio(density, lo, info.mode);
            UnimodalityReport {
                class: info.unimodal_class,
                epsilon: edge,
                xi,
                m0: m0_from(best),
                certified: best.is_finite(),
                violation: None,
            }
        }
        UnimodalClass::PositiveModeZeroLimit => {
            let epsilon = edge + 0.5 * (info.mode - edge);
            let violation = monotone_violation(density, edge, epsilon);
            let hi = density.quantile(TAIL_QUANTILE).max(info.mode);
            let lo = epsilon + 1e-9 * (epsilon - edge);
            let (xi, best) = maximise_ratio(density, lo, hi);
            UnimodalityReport {
                class: info.unimodal_class,
                epsilon,
                xi,
                m0: m0_from(best),
                certified: violation.is_none() && best.is_finite(),
                violation,
            }
        }
    }
}

/// Scans `f'/f²` on a log-spaced grid over `(edge, epsilon]` and returns
/// the first point where it increases. Saturated values count as `+inf`.
fn monotone_violation<D: NoiseDensity + ?Sized>(density: &D, edge: f64, epsilon: f64) -> Option<f64> {
    let span = epsilon - edge;
    let (log_lo, log_hi) = ((span * 1e-6).ln(), span.ln());
    let mut previous = f64::INFINITY;
    for i in 0..=MONOTONE_GRID {
        let offset = (log_lo + (log_hi - log_lo) * i as f64 / MONOTONE_GRID as f64).exp();
        let z = edge + offset;
        let r = lemma1_ratio(density, z).value;
        if r > previous + 1e-12 * previous.abs() {
            return Some(z);
        }
        previous = r;
    }
    None
}
