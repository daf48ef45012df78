//! Scalar bracketing root finders shared by the main solve path.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Plain bisection on `[a, b]` until `|f(x)| <= tol`.
///
/// `fa` and `fb` must have opposite signs (or one of them already satisfy the
/// tolerance, in which case that endpoint is returned).
pub fn bisect<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, tol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if fa.abs() <= tol {
        return Ok(Root {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb.abs() <= tol {
        return Ok(Root {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for it in 1..=max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm.abs() <= tol {
            return Ok(Root {
                x: mid,
                fx: fm,
                iterations: it,
            });
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: best.1,
    })
}

/// Bisection down to a bracket of width `switch_width`, then safeguarded
/// secant steps. A secant candidate outside the live bracket, or a step
/// that fails to halve it, triggers a bisection step.
#[allow(clippy::too_many_arguments)]
pub fn bisect_then_secant<F>(
    mut f: F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    tol: f64,
    switch_width: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if fa.abs() <= tol {
        return Ok(Root {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb.abs() <= tol {
        return Ok(Root {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    // last two iterates for the secant
    let (mut x0, mut f0, mut x1, mut f1) = (a, fa, b, fb);
    let mut force_bisect = false;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };

    for it in 1..=max_iter {
        let width = hi - lo;
        let mid = lo + 0.5 * width;
        if mid <= lo || mid >= hi {
            break;
        }
        let mut x = mid;
        if width <= switch_width && !force_bisect && f1 != f0 {
            let candidate = x1 - f1 * (x1 - x0) / (f1 - f0);
            if candidate > lo && candidate < hi {
                x = candidate;
            }
        }
        let fx = f(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= tol {
            return Ok(Root { x, fx, iterations: it });
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        (x0, f0, x1, f1) = (x1, f1, x, fx);
        force_bisect = hi - lo > 0.5 * width;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: best.1,
    })
}
