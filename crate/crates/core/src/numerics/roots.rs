use super::{Interval, NumericsError, SolverDiagnostics};

const MAX_ITERATIONS: usize = 400;

/// A bracketed root and how it was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub diagnostics: SolverDiagnostics,
}

/// Finds a sign change of `h` inside `bracket`.
///
/// Illinois-modified secant steps, with a bisection step whenever the
/// bracket fails to halve. Stops once the bracket is narrower than `tol`
/// or `h` evaluates to exactly zero. The returned point always lies in
/// the original bracket.
pub fn find_root<H>(h: H, bracket: Interval, tol: f64) -> Result<Root, NumericsError>
where
    H: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    if !bracket.is_bounded() {
        return Err(NumericsError::InvalidInterval {
            lo: bracket.lo(),
            hi: bracket.hi(),
        });
    }
    let eval = |x: f64| {
        let v = h(x);
        if v.is_nan() {
            Err(NumericsError::NotANumber { x })
        } else {
            Ok(v)
        }
    };

    let (mut a, mut b) = (bracket.lo(), bracket.hi());
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    let done = |x: f64, fx: f64, iterations: usize| Root {
        x,
        diagnostics: SolverDiagnostics {
            iterations,
            residual: fx.abs(),
            converged: true,
        },
    };
    if fa == 0.0 {
        return Ok(done(a, fa, 0));
    }
    if fb == 0.0 {
        return Ok(done(b, fb, 0));
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoRoot {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    // +1: last update moved `b`, -1: moved `a`.
    let mut side = 0i8;
    // Bracket widths one and two iterations back.
    let mut widths = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let width = b - a;
        let bisect = !(fa.is_finite() && fb.is_finite()) || width > 0.5 * widths.1;
        let mut x = if bisect {
            0.5 * (a + b)
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = eval(x)?;
        if fx == 0.0 {
            return Ok(done(x, fx, iterations));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        widths = (width, widths.0);
    }

    // The Illinois halving distorts fa/fb, so re-evaluate for the residual.
    let (ra, rb) = (eval(a)?, eval(b)?);
    let (x, fx) = if ra.abs() <= rb.abs() { (a, ra) } else { (b, rb) };
    Ok(Root {
        x,
        diagnostics: SolverDiagnostics {
            iterations,
            residual: fx.abs(),
            converged: b - a <= tol,
        },
    })
}
