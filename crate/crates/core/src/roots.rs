//! Bracketed root finding for continuous scalar functions.

use crate::{Error, Result};

const MAX_ITER: usize = 400;

/// Root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// Bisection shrinks the bracket to a thousandth of its width, then secant
/// steps take over; a secant step that leaves the bracket falls back to
/// bisection. Stops once `|f| < ftol` or the bracket collapses to rounding.
pub fn bisect_secant<F>(f: F, mut lo: f64, mut hi: f64, ftol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 || flo.abs() < ftol {
        return Ok(lo);
    }
    if fhi == 0.0 || fhi.abs() < ftol {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotFound(format!(
            "no sign change on [{lo}, {hi}] (f = {flo:e}, {fhi:e})"
        )));
    }

    let coarse = (hi - lo) * 1e-3;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        let x = if width > coarse {
            0.5 * (lo + hi)
        } else {
            let s = hi - fhi * (hi - lo) / (fhi - flo);
            if s > lo && s < hi {
                s
            } else {
                0.5 * (lo + hi)
            }
        };
        let fx = f(x);
        if fx == 0.0 || fx.abs() < ftol {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            return Ok(if flo.abs() < fhi.abs() { lo } else { hi });
        }
    }
    Err(Error::RootNotFound(format!(
        "no convergence on [{lo}, {hi}] after {MAX_ITER} iterations"
    )))
}

/// Locate the switch point of a predicate that is false at `lo` and true at
/// `hi`, to absolute width `tol`. Returns the first point known to be true.
pub fn bisect_predicate<P>(pred: P, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    P: Fn(f64) -> bool,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
