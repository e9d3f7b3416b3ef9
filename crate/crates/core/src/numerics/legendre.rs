use serde::{Deserialize, Serialize};

use super::{minimize_1d, Interval, NumericsError, MIN_TOL};

/// Doubling stops here; a supremum still increasing at this scale is
/// reported as infinite.
const EXPANSION_CAP: f64 = 1e18;

/// Set of `λ` on which a cumulant generating function is finite.
/// Either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl LambdaRange {
    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    /// `(-inf, hi)` or `(-inf, hi]`.
    pub fn below(hi: f64, closed: bool) -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi,
            lo_closed: false,
            hi_closed: closed,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above_lo = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below_hi = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above_lo && below_hi
    }

    fn upper_limit(&self) -> f64 {
        if self.hi.is_infinite() {
            EXPANSION_CAP
        } else if self.hi_closed {
            self.hi
        } else {
            self.hi - 1e-12 * self.hi.abs().max(1.0)
        }
    }

    fn lower_limit(&self) -> f64 {
        if self.lo.is_infinite() {
            -EXPANSION_CAP
        } else if self.lo_closed {
            self.lo
        } else {
            self.lo + 1e-12 * self.lo.abs().max(1.0)
        }
    }
}

/// Value of a rate function: finite, or `+inf` when the supremum diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RateValue {
    Finite(f64),
    Infinite,
}

impl RateValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            RateValue::Finite(v) => Some(v),
            RateValue::Infinite => None,
        }
    }

    /// Finite values as themselves, `Infinite` as `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// `sup_λ { λ v - Λ(λ) }` over `range`, which must contain 0.
///
/// The objective is concave, so the search brackets the maximiser by
/// doubling outward from 0 and then runs golden-section on the bracket.
pub fn legendre_transform<C>(cgf: C, range: LambdaRange, v: f64) -> Result<RateValue, NumericsError>
where
    C: Fn(f64) -> f64,
{
    if !range.contains(0.0) {
        return Err(NumericsError::InvalidInterval {
            lo: range.lo,
            hi: range.hi,
        });
    }
    if !v.is_finite() {
        return Err(NumericsError::NotANumber { x: v });
    }
    let objective = |lambda: f64| lambda * v - cgf(lambda);

    let upper = match expand(&objective, range.upper_limit(), range.hi.is_infinite())? {
        Some(u) => u,
        None => return Ok(RateValue::Infinite),
    };
    let lower = match expand(&objective, range.lower_limit(), range.lo.is_infinite())? {
        Some(l) => l,
        None => return Ok(RateValue::Infinite),
    };

    let domain = Interval::new(lower, upper)?;
    let tol = MIN_TOL * 1e-2 * domain.width().max(1.0);
    let best = minimize_1d(|l| -objective(l), domain, tol)?;
    // λ = 0 always gives 0, so the transform is never negative.
    Ok(RateValue::Finite((-best.min).max(0.0)))
}

/// Walks from 0 towards `limit` by doubling until the concave objective
/// stops increasing. `None` means it was still increasing at an
/// unbounded limit.
fn expand<F>(objective: &F, limit: f64, unbounded: bool) -> Result<Option<f64>, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let sign = limit.signum();
    let mut r = sign;
    if r.abs() >= limit.abs() {
        return Ok(Some(limit));
    }
    let mut f_r = objective(r);
    loop {
        let next = 2.0 * r;
        if next.abs() >= limit.abs() {
            if unbounded {
                let f_lim = objective(limit);
                if f_lim.is_nan() {
                    return Err(NumericsError::NotANumber { x: limit });
                }
                if f_lim > f_r {
                    return Ok(None);
                }
            }
            return Ok(Some(limit));
        }
        let f_next = objective(next);
        if f_next.is_nan() {
            return Err(NumericsError::NotANumber { x: next });
        }
        if f_next <= f_r {
            return Ok(Some(next));
        }
        r = next;
        f_r = f_next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1_cgf(l: f64) -> f64 {
        -(1.0 - l).ln()
    }

    #[test]
    fn gaussian_rate() {
        let r = legendre_transform(|l| 0.5 * l * l, LambdaRange::real_line(), 1.0).unwrap();
        assert!((r.as_f64() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn exponential_rate_vanishes_at_mean() {
        let r = legendre_transform(exp1_cgf, LambdaRange::below(1.0, false), 1.0).unwrap();
        assert!(r.as_f64().abs() < 1e-12);
    }

    #[test]
    fn exponential_rate_closed_form() {
        let r = legendre_transform(exp1_cgf, LambdaRange::below(1.0, false), 2.0).unwrap();
        let expected = 2.0 - 1.0 - 2f64.ln();
        assert!((r.as_f64() - expected).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn linear_cgf_has_infinite_rate_off_its_value() {
        // Degenerate Z = 1: Λ(λ) = λ.
        let r = legendre_transform(|l| l, LambdaRange::real_line(), 1.5).unwrap();
        assert_eq!(r, RateValue::Infinite);
        let r = legendre_transform(|l| l, LambdaRange::real_line(), 1.0).unwrap();
        assert!(r.as_f64().abs() < 1e-12);
    }

    #[test]
    fn range_must_contain_zero() {
        let range = LambdaRange {
            lo: 1.0,
            hi: 2.0,
            lo_closed: true,
            hi_closed: true,
        };
        assert!(legendre_transform(|l| l, range, 0.0).is_err());
    }
}
