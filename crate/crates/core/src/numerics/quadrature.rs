use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Interval, NumericsError, SolverDiagnostics, QUAD_REL_TOL};

// Kronrod abscissae on [-1, 1] (non-negative half); odd indices are the
// 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Knobs for [`integrate_with`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Absolute error below which the estimate is accepted regardless of
    /// the relative target.
    pub abs_tol: f64,
    pub max_subintervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: QUAD_REL_TOL,
            abs_tol: 1e-300,
            max_subintervals: 5000,
        }
    }
}

/// Result of an adaptive quadrature run.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub diagnostics: SolverDiagnostics,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Result<Segment, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteIntegrand { x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let error = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    Ok(Segment {
        a,
        b,
        value: res_k * half,
        error,
    })
}

fn adaptive<F>(f: &F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let first = gauss_kronrod(f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut frozen_err = 0.0;
    let mut frozen_val = 0.0;

    let target = |v: f64| (opts.rel_tol * v.abs()).max(opts.abs_tol);

    while total_err > target(total) {
        if heap.len() >= opts.max_subintervals {
            return Err(NumericsError::QuadratureNotConverged {
                estimate: total,
                error: total_err,
                subintervals: heap.len(),
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs() {
            // Cannot split further; keep its contribution but stop refining it.
            frozen_err += worst.error;
            frozen_val += worst.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum periodically to avoid drift in the running totals.
        if heap.len() % 64 == 0 {
            total = frozen_val + heap.iter().map(|s| s.value).sum::<f64>();
            total_err = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }

    let value = frozen_val + heap.iter().map(|s| s.value).sum::<f64>();
    let abs_error = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
    let converged = abs_error <= target(value);
    if !converged {
        return Err(NumericsError::QuadratureNotConverged {
            estimate: value,
            error: abs_error,
            subintervals: heap.len(),
        });
    }
    Ok(Quadrature {
        value,
        abs_error,
        diagnostics: SolverDiagnostics {
            iterations: heap.len(),
            residual: abs_error,
            converged,
        },
    })
}

/// Adaptive Gauss-Kronrod quadrature with explicit options.
///
/// Semi-infinite domains `[lo, inf)` are mapped onto `[0, 1)` through
/// `y = lo + t / (1 - t)`.
pub fn integrate_with<F>(
    f: F,
    domain: Interval,
    opts: &QuadratureOptions,
) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-2) {
        return Err(NumericsError::InvalidTolerance(opts.rel_tol));
    }
    if domain.is_bounded() {
        adaptive(&f, domain.lo(), domain.hi(), opts)
    } else {
        let lo = domain.lo();
        let mapped = |t: f64| {
            // y = lo + u², u = t / (1 - t): algebraic tails down to
            // y^{-3/2} stay bounded in t.
            let s = 1.0 - t;
            let u = t / s;
            let v = f(lo + u * u);
            if v == 0.0 {
                0.0
            } else {
                v * 2.0 * u / (s * s)
            }
        };
        adaptive(&mapped, 0.0, 1.0, opts)
    }
}

/// Integrates `f` over `domain` to relative accuracy `rel_tol`.
pub fn integrate<F>(f: F, domain: Interval, rel_tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let opts = QuadratureOptions {
        rel_tol,
        ..QuadratureOptions::default()
    };
    integrate_with(f, domain, &opts).map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponential_on_half_line() {
        let v = integrate(|y| (-y).exp(), Interval::half_line(0.0).unwrap(), 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_on_finite_interval() {
        let v = integrate(|_| 1.0, Interval::new(0.25, 1.0).unwrap(), 1e-10).unwrap();
        assert!((v - 0.75).abs() < 1e-14);
    }

    #[test]
    fn levy_tail_mass() {
        let levy = |z: f64| {
            if z <= 0.0 {
                0.0
            } else {
                (1.0 / (2.0 * std::f64::consts::PI * z.powi(3))).sqrt() * (-1.0 / (2.0 * z)).exp()
            }
        };
        // Lévy(0,1) cdf at 1 is erfc(sqrt(1/2)); the tail beyond 1 is erf(sqrt(1/2)).
        let head = integrate(levy, Interval::new(0.0, 1.0).unwrap(), 1e-9).unwrap();
        assert!((head - 0.317_310_507_862_914_1).abs() < 1e-9, "{head}");
        let tail = integrate(levy, Interval::half_line(1.0).unwrap(), 1e-9).unwrap();
        assert!((tail - 0.682_689_492_137_085_9).abs() < 1e-8, "{tail}");
    }

    #[test]
    fn nan_integrand_is_rejected() {
        let err = integrate(|_| f64::NAN, Interval::new(0.0, 1.0).unwrap(), 1e-6).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn tolerance_outside_range_is_rejected() {
        let err = integrate(|x| x, Interval::new(0.0, 1.0).unwrap(), 0.5).unwrap_err();
        assert_eq!(err, NumericsError::InvalidTolerance(0.5));
    }

    #[test]
    fn subinterval_cap_reports_best_estimate() {
        let opts = QuadratureOptions {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_subintervals: 3,
        };
        let err = integrate_with(|x: f64| x.sqrt().recip(), Interval::new(0.0, 1.0).unwrap(), &opts)
            .unwrap_err();
        match err {
            NumericsError::QuadratureNotConverged { estimate, .. } => {
                assert!((estimate - 2.0).abs() < 0.5)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn integration_is_linear(
            c in proptest::collection::vec(-3.0f64..3.0, 4),
            d in proptest::collection::vec(-3.0f64..3.0, 4),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let dom = Interval::new(-1.0, 2.0).unwrap();
            let poly = |k: &[f64], x: f64| k.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
            // Exact antiderivative of the cubic for the scale.
            let exact = |k: &[f64]| {
                let anti = |x: f64| k.iter().enumerate().map(|(i, ci)| ci * x.powi(i as i32 + 1) / (i as f64 + 1.0)).sum::<f64>();
                anti(2.0) - anti(-1.0)
            };
            let opts = QuadratureOptions { rel_tol: 1e-10, abs_tol: 1e-12, ..Default::default() };
            let combined = integrate_with(|x| a * poly(&c, x) + b * poly(&d, x), dom, &opts).unwrap().value;
            let expected = a * exact(&c) + b * exact(&d);
            let scale = 1.0 + (a * exact(&c)).abs() + (b * exact(&d)).abs();
            prop_assert!((combined - expected).abs() <= 1e-10 * scale);
        }
    }
}
