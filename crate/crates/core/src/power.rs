//! Overflow-safe power helpers.
//!
//! Everything the surface needs reduces to `t^p` and `(1 + t^p)^(-1/p)` for
//! `t >= 0`. Both are evaluated through logarithms so that `p` up to the
//! exponent cap never overflows an intermediate.

/// `t^p` for `t >= 0`, evaluated as `exp(p ln t)`.
#[inline]
pub fn pow_nonneg(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        (p * t.ln()).exp()
    }
}

/// `ln(1 + t^p)` for `t >= 0` without forming `t^p` when it would overflow.
#[inline]
pub fn ln_one_plus_pow(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let l = p * t.ln();
    if l > 0.0 {
        l + (-l).exp().ln_1p()
    } else {
        l.exp().ln_1p()
    }
}

/// The boundary scale factor `(1 + t^p)^(-1/p)`.
///
/// `(c, t c)` is the point of slope `t` on the unit sphere `|x|^p + |y|^p = 1`.
#[inline]
pub fn sphere_scale(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (-ln_one_plus_pow(t, p) / p).exp()
    }
}

/// `x^p` for real `x` with a sign-aware rule for negative bases.
///
/// Negative bases are accepted only when `p` is an exact integer, in which
/// case the result carries the sign of `x` for odd `p`. Otherwise `None`.
pub fn signed_pow(x: f64, p: f64) -> Option<f64> {
    if x >= 0.0 {
        return Some(pow_nonneg(x, p));
    }
    if p.fract() != 0.0 {
        return None;
    }
    let magnitude = pow_nonneg(-x, p);
    // p <= MAX_EXPONENT, so the cast is exact.
    if (p as i64) % 2 == 0 {
        Some(magnitude)
    } else {
        Some(-magnitude)
    }
}
