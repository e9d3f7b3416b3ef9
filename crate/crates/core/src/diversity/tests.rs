use super::*;
use crate::distributions::{ModeInfo, NoiseModel, UnimodalClass};

fn exp1() -> NoiseModel {
    NoiseModel::exponential(1.0).unwrap()
}
fn unif1() -> NoiseModel {
    NoiseModel::uniform(1.0).unwrap()
}
fn ig11() -> NoiseModel {
    NoiseModel::inverse_gaussian(1.0, 1.0).unwrap()
}
fn levy01() -> NoiseModel {
    NoiseModel::levy(0.0, 1.0).unwrap()
}

fn finite(e: Exponent) -> f64 {
    e.finite().expect("finite exponent")
}

/// Brute-force sign scan of the first-arrival stationarity equation:
/// ln f(y) - ln f(y-Δ) - (M-1) ln S(y-Δ)/S(y), with S = 1 - F.
fn threshold_by_scan(noise: &NoiseModel, delta: f64, m: usize, points: usize) -> f64 {
    let mode = noise.mode_info().mode;
    let g = |y: f64| {
        let ratio = noise.log_pdf(y) - noise.log_pdf(y - delta);
        let surv = ((1.0 - noise.cdf(y - delta)) / (1.0 - noise.cdf(y))).ln();
        ratio - (m - 1) as f64 * surv
    };
    let step = mode / points as f64;
    let mut prev = g(delta + step * 0.5);
    for i in 1..points {
        let y = delta + step * (i as f64 + 0.5);
        let cur = g(y);
        if prev > 0.0 && cur <= 0.0 {
            return y - 0.5 * step;
        }
        prev = cur;
    }
    panic!("no sign change found");
}

#[test]
fn chernoff_exponential_sits_on_the_boundary() {
    let c = chernoff_diversity(&exp1(), 1.5).unwrap();
    assert!((finite(c.d_ml) - 1.5).abs() < 1e-3);
    assert!((c.s_star - 1.0).abs() < 1e-6);
}

#[test]
fn chernoff_table_entries() {
    let ig = chernoff_diversity(&ig11(), 1.0).unwrap();
    assert!((finite(ig.d_ml) - 1.1070).abs() < 5e-3, "{ig:?}");
    let levy = chernoff_diversity(&levy01(), 0.5).unwrap();
    assert!((finite(levy.d_ml) - 0.1791).abs() < 5e-3, "{levy:?}");
}

#[test]
fn chernoff_disjoint_supports_are_error_free() {
    let c = chernoff_diversity(&unif1(), 1.5).unwrap();
    assert_eq!(c.d_ml, Exponent::Infinite);
    assert_eq!(fa_diversity(&unif1(), 1.5).unwrap(), Exponent::Infinite);
}

#[test]
fn invalid_delta_is_rejected() {
    assert!(matches!(chernoff_diversity(&exp1(), 0.0), Err(DiversityError::InvalidDelta(_))));
    assert!(matches!(linear_diversity(&exp1(), -1.0), Err(DiversityError::InvalidDelta(_))));
    assert!(matches!(fa_threshold(&exp1(), 1.0, 0), Err(DiversityError::InvalidParticleCount)));
}

#[test]
fn linear_exponential_matches_closed_form_alpha() {
    let lin = linear_diversity(&exp1(), 0.5).unwrap();
    // α = (1 - e^{bΔ}(1 - bΔ)) / ((e^{bΔ} - 1) b) at b = 1, Δ = 0.5
    let e = 0.5f64.exp();
    let alpha = (1.0 - e * 0.5) / (e - 1.0);
    assert!((lin.alpha.unwrap() - alpha).abs() < 1e-8);
    assert!((alpha - 0.27075).abs() < 1e-5);
    assert!((finite(lin.d_lin) - 0.0312).abs() < 2e-3);
}

#[test]
fn linear_uniform_and_levy() {
    let lin = linear_diversity(&unif1(), 0.75).unwrap();
    assert!((finite(lin.d_lin) - 1.0798).abs() < 2e-3);
    // Symmetric noise balances halfway.
    assert!((lin.alpha.unwrap() - 0.375).abs() < 1e-8);
    let lin = linear_diversity(&levy01(), 1.3).unwrap();
    assert_eq!(lin.d_lin, Exponent::Finite(0.0));
    assert_eq!(lin.alpha, None);
}

#[test]
fn linear_disjoint_means_is_infinite() {
    let lin = linear_diversity(&unif1(), 1.5).unwrap();
    assert_eq!(lin.d_lin, Exponent::Infinite);
}

#[test]
fn fa_exponents() {
    assert!((finite(fa_diversity(&unif1(), 0.5).unwrap()) - 2f64.ln()).abs() < 1e-12);
    assert!((finite(fa_diversity(&levy01(), 1.0).unwrap()) - 0.3817).abs() < 1e-4);
    assert!((finite(fa_diversity(&ig11(), 1.0).unwrap()) - 1.1029).abs() < 1e-4);
}

#[test]
fn fa_threshold_zero_mode_is_delta() {
    for m in [1, 5, 100] {
        let t = fa_threshold(&exp1(), 1.0, m).unwrap();
        assert_eq!(t.theta, 1.0);
        assert!(t.boundary);
    }
}

#[test]
fn fa_threshold_matches_grid_scan() {
    for &(m, tol) in &[(1usize, 1e-5), (10, 1e-5), (1000, 1e-5)] {
        let t = fa_threshold(&ig11(), 1.0, m).unwrap();
        let scan = threshold_by_scan(&ig11(), 1.0, m, 200_000);
        assert!(!t.boundary);
        assert!((t.theta - scan).abs() < tol, "M={m}: {} vs {scan}", t.theta);
    }
    let t = fa_threshold(&ig11(), 1.0, 1000).unwrap();
    assert!(t.theta - 1.0 < 1e-2);
}

#[test]
fn fa_threshold_stays_between_modes() {
    for noise in [ig11(), levy01()] {
        let mode = noise.mode_info().mode;
        for m in [1, 2, 7, 50, 500] {
            let t = fa_threshold(&noise, 0.8, m).unwrap();
            assert!(t.theta >= 0.8 && t.theta <= 0.8 + mode);
        }
    }
}

#[test]
fn fa_error_probability_examples() {
    let p = fa_error_probability(&exp1(), 0.5, 4).unwrap();
    assert!((p - 0.5 * (-2.0f64).exp()).abs() < 1e-15);
    assert_eq!(fa_error_probability(&ig11(), 0.0, 7).unwrap(), 0.5);
    let p = fa_error_probability(&unif1(), 0.5, 10).unwrap();
    assert!((p - 0.5 * 0.5f64.powi(10)).abs() < 1e-15);
}

#[test]
fn fa_error_probability_brute_force_integral() {
    // Independent route: P = 0.5 [P(Y_FA >= θ | 0) + P(Y_FA < θ | Δ)]
    // with the first-arrival density M f (1-F)^{M-1} integrated by a
    // midpoint rule.
    let noise = ig11();
    let (delta, m) = (1.0, 3usize);
    let theta = fa_threshold(&noise, delta, m).unwrap().theta;
    let fa_pdf = |z: f64| {
        if z <= 0.0 {
            0.0
        } else {
            m as f64 * noise.pdf(z) * (1.0 - noise.cdf(z)).powi(m as i32 - 1)
        }
    };
    let midpoint = |a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        (0..n).map(|i| fa_pdf(a + h * (i as f64 + 0.5))).sum::<f64>() * h
    };
    let miss = 1.0 - midpoint(0.0, theta, 400_000);
    let false_alarm = midpoint(0.0, theta - delta, 400_000);
    let brute = 0.5 * (miss + false_alarm);
    let p = fa_error_probability(&noise, delta, m).unwrap();
    assert!((p - brute).abs() < 1e-7, "{p} vs {brute}");
}

#[test]
fn certificates() {
    let u = unimodality_certificate(&unif1());
    assert_eq!((u.class, u.m0, u.certified), (UnimodalClass::ZeroMode, 1, true));
    let e = unimodality_certificate(&exp1());
    assert_eq!((e.class, e.m0), (UnimodalClass::ZeroMode, 1));
    for noise in [ig11(), levy01()] {
        let c = unimodality_certificate(&noise);
        assert_eq!(c.class, UnimodalClass::PositiveModeZeroLimit);
        assert!(c.certified, "{noise}: {c:?}");
        assert!(c.xi > c.epsilon);
        assert!(c.m0 >= 1);
        assert!((c.epsilon - noise.mode_info().mode / 2.0).abs() < 1e-15);
    }
}

/// f(z) = (1 + 2z) e^{-z} / 3: mode 1/2, f(0+) = 1/3.
struct PositiveEdge;

impl crate::distributions::NoiseDensity for PositiveEdge {
    fn pdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            0.0
        } else {
            (1.0 + 2.0 * z) * (-z).exp() / 3.0
        }
    }
    fn d_log_pdf(&self, z: f64) -> f64 {
        2.0 / (1.0 + 2.0 * z) - 1.0
    }
    fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else {
            (3.0 - (3.0 + 2.0 * z) * (-z).exp()) / 3.0
        }
    }
    fn support(&self) -> crate::numerics::Interval {
        crate::numerics::Interval::half_line(0.0).unwrap()
    }
    fn mode_info(&self) -> ModeInfo {
        ModeInfo {
            mode: 0.5,
            density_at_zero_limit: 1.0 / 3.0,
            unimodal_class: UnimodalClass::PositiveModePositiveLimit,
        }
    }
}

#[test]
fn certificate_for_positive_edge_density() {
    let c = unimodality_certificate(&PositiveEdge);
    // Oracle: f'(1-F)/f² = (1-2z)(3+2z) / (1+2z)² is largest at z -> 0,
    // where it equals 3; M0 = ceil(3) + 1.
    assert!(c.certified);
    assert_eq!(c.class, UnimodalClass::PositiveModePositiveLimit);
    assert_eq!(c.m0, 4);
    assert!(c.xi < 1e-6);
}

#[test]
fn closed_form_examples() {
    let u = closed_form_diversity(&unif1(), 0.25).unwrap();
    assert!((finite(u.d_ml.unwrap()) - (4.0f64 / 3.0).ln()).abs() < 1e-15);
    assert_eq!(u.d_ml, u.d_fa);
    let e = closed_form_diversity(&exp1(), 2.5).unwrap();
    assert!((finite(e.d_lin.unwrap()) - 0.7216).abs() < 1e-4);
    let rate = closed_form_rate(&ig11(), 1.0).unwrap();
    assert_eq!(rate.as_f64(), 0.0);
    let l = closed_form_diversity(&levy01(), 1.5).unwrap();
    assert_eq!(l.d_lin, Some(Exponent::Finite(0.0)));
    assert!(l.d_ml.is_none());
}

fn table_grid() -> Vec<(NoiseModel, f64)> {
    let mut grid = Vec::new();
    for d in [0.25, 0.5, 0.75] {
        grid.push((unif1(), d));
    }
    for d in [0.5, 1.5, 2.5] {
        grid.push((exp1(), d));
    }
    for d in [0.5, 1.0, 1.5] {
        grid.push((ig11(), d));
        grid.push((levy01(), d));
    }
    grid
}

#[test]
fn ml_dominates_the_other_detectors() {
    for (noise, delta) in table_grid() {
        let r = diversity_report(&noise, delta).unwrap();
        let ml = r.d_ml.as_f64();
        assert!(ml + 1e-3 >= r.d_fa.as_f64(), "{noise} Δ={delta}: {r:?}");
        assert!(ml + 1e-3 >= r.d_lin.as_f64(), "{noise} Δ={delta}: {r:?}");
    }
}

#[test]
fn zero_mode_collapse() {
    for noise in [unif1(), exp1()] {
        for delta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let ml = finite(chernoff_diversity(&noise, delta).unwrap().d_ml);
            let fa = finite(fa_diversity(&noise, delta).unwrap());
            assert!((ml - fa).abs() <= 1e-3, "{noise} Δ={delta}: {ml} vs {fa}");
        }
    }
}

#[test]
fn chernoff_objective_is_midpoint_convex() {
    for (noise, delta) in table_grid() {
        let values: Vec<f64> = (0..=20)
            .map(|i| chernoff_log_coefficient(&noise, delta, i as f64 / 20.0).unwrap())
            .collect();
        for w in values.windows(3) {
            assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-9, "{noise} Δ={delta}: {w:?}");
        }
    }
}

#[test]
fn fa_error_slope_matches_exponent() {
    for (noise, delta) in table_grid() {
        let lp200 = fa_log_error_probability(&noise, delta, 200).unwrap();
        let lp400 = fa_log_error_probability(&noise, delta, 400).unwrap();
        let slope = (lp200 - lp400) / 200.0;
        let d = finite(fa_diversity(&noise, delta).unwrap());
        assert!((slope - d).abs() < 1e-3, "{noise} Δ={delta}: {slope} vs {d}");
    }
}

#[test]
fn fa_threshold_is_nonincreasing_in_m() {
    for noise in [ig11(), levy01()] {
        let m0 = unimodality_certificate(&noise).m0;
        let mut previous = f64::INFINITY;
        for m in m0..=1000 {
            let theta = fa_threshold(&noise, 1.0, m).unwrap().theta;
            assert!(theta <= previous + 1e-12, "{noise} M={m}");
            previous = theta;
        }
    }
}

#[test]
fn closed_forms_match_numeric_routes() {
    for (noise, delta) in table_grid() {
        let cf = closed_form_diversity(&noise, delta).unwrap();
        let r = diversity_report(&noise, delta).unwrap();
        let pairs = [(cf.d_ml, r.d_ml), (cf.d_fa, r.d_fa), (cf.d_lin, r.d_lin)];
        for (closed, numeric) in pairs {
            if let Some(closed) = closed {
                assert!(
                    (closed.as_f64() - numeric.as_f64()).abs() < 1e-3,
                    "{noise} Δ={delta}: {closed:?} vs {numeric:?}"
                );
            }
        }
    }
}
