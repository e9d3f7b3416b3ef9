use super::{Interval, NumericsError, SolverDiagnostics};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of a minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub argmin: f64,
    pub min: f64,
    pub diagnostics: SolverDiagnostics,
}

/// Golden-section search over a closed, bounded `domain`.
///
/// Both endpoints are evaluated as well and the smallest of the three
/// candidates wins, so boundary optima are found exactly. Callers must
/// supply a unimodal `g` for the interior result to be meaningful.
pub fn minimize_1d<G>(g: G, domain: Interval, tol: f64) -> Result<Minimum, NumericsError>
where
    G: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    if !domain.is_bounded() {
        return Err(NumericsError::InvalidInterval {
            lo: domain.lo(),
            hi: domain.hi(),
        });
    }
    let eval = |x: f64| {
        let v = g(x);
        if v.is_nan() {
            Err(NumericsError::NotANumber { x })
        } else {
            Ok(v)
        }
    };

    let (lo, hi) = (domain.lo(), domain.hi());
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut iterations = 0;
    while (b - a) > tol {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (mut argmin, mut min) = if fc <= fd { (c, fc) } else { (d, fd) };
    let width = b - a;
    for x in [lo, hi] {
        let fx = eval(x)?;
        if fx < min {
            argmin = x;
            min = fx;
        }
    }
    Ok(Minimum {
        argmin,
        min,
        diagnostics: SolverDiagnostics {
            iterations,
            residual: width,
            converged: width <= tol,
        },
    })
}
