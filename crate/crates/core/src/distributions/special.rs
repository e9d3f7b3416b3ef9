//! Error-function helpers in linear and log space.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// `ln erfc(x)`, accurate for large positive `x` where `erfc` underflows.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 26.0 {
        return erfc(x).ln();
    }
    let x2 = x * x;
    let inv = 1.0 / (2.0 * x2);
    // Asymptotic series 1 - 1/(2x²) + 3/(4x⁴) - 15/(8x⁶) + 105/(16x⁸).
    let series = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv.powi(3) + 105.0 * inv.powi(4);
    -x2 - (x * PI.sqrt()).ln() + series.ln()
}

/// Standard normal cdf.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `ln Φ(x)`.
pub fn ln_std_normal_cdf(x: f64) -> f64 {
    ln_erfc(-x * FRAC_1_SQRT_2) - std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_reference_values() {
        // erfc(1/sqrt 2) = 1 - erf(1/sqrt 2), the two-sided 1-sigma tail.
        assert!((erfc(FRAC_1_SQRT_2) - 0.317_310_507_862_914_1).abs() < 1e-15);
        assert!((std_normal_cdf(-2.0) - 0.022_750_131_948_179_2).abs() < 1e-16);
    }

    #[test]
    fn ln_erfc_matches_direct_evaluation_at_switch() {
        for &x in &[20.0, 25.0, 25.9] {
            let direct = erfc(x).ln();
            let series = {
                let x2: f64 = x * x;
                let inv = 1.0 / (2.0 * x2);
                let s = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv.powi(3) + 105.0 * inv.powi(4);
                -x2 - (x * PI.sqrt()).ln() + s.ln()
            };
            assert!((direct - series).abs() < 1e-12 * direct.abs(), "{x}");
        }
        assert!(ln_erfc(40.0).is_finite());
    }

    #[test]
    fn ln_phi_tail() {
        assert!((ln_std_normal_cdf(0.0) + std::f64::consts::LN_2).abs() < 1e-15);
        assert!(ln_std_normal_cdf(-50.0) < -1200.0);
    }
}
