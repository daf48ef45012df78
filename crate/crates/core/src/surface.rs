//! The moduli surface `Δ_p(τ, σ)` and the rectangle `R_p` it is minimized on.

use crate::error::{Error, Result};
use crate::power::{pow_nonneg, sphere_scale};
use crate::rootfind::{bisect_then_secant, Root};

/// Largest supported ball exponent.
pub const MAX_EXPONENT: f64 = 512.0;

/// Default residual tolerance for the `τ_p` root.
pub const DEFAULT_CORNER_TOL: f64 = 1e-12;

const CORNER_MAX_ITER: usize = 200;
const CORNER_SWITCH_WIDTH: f64 = 1e-3;
const UNIQUENESS_SCAN_POINTS: usize = 64;

/// Exponent `p` of the Minkowski ball `|x|^p + |y|^p <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BallExponent(f64);

impl BallExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 && p <= MAX_EXPONENT {
            Ok(BallExponent(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BallExponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        BallExponent::new(p)
    }
}

/// A pair of slope parameters `(τ, σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuliPoint {
    pub tau: f64,
    pub sigma: f64,
}

impl ModuliPoint {
    pub fn new(tau: f64, sigma: f64) -> Self {
        ModuliPoint { tau, sigma }
    }

    /// Checks both coordinates are finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("tau", self.tau), ("sigma", self.sigma)] {
            if !value.is_finite() {
                return Err(Error::NonFiniteInput { name, value });
            }
            if value < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} = {value} must be >= 0")));
            }
        }
        Ok(())
    }

    /// A point of the domain `0 <= τ <= τ_p`, `1 <= σ <= σ_p`.
    pub fn in_domain(tau: f64, sigma: f64, bounds: &DomainBounds) -> Result<Self> {
        let point = ModuliPoint::new(tau, sigma);
        point.validate()?;
        if bounds.contains(tau, sigma) {
            Ok(point)
        } else {
            Err(Error::InvalidArgument(format!(
                "({tau}, {sigma}) outside [0, {}] x [1, {}]",
                bounds.tau_p, bounds.sigma_p
            )))
        }
    }
}

/// Corner constants `(τ_p, σ_p)` of the rectangle `R_p = [0, τ_p] × [1, σ_p]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBounds {
    pub tau_p: f64,
    pub sigma_p: f64,
    /// `2(1 - τ_p)^p - (1 + τ_p^p)` at the returned root.
    pub tau_p_residual: f64,
}

impl DomainBounds {
    pub fn contains(&self, tau: f64, sigma: f64) -> bool {
        (0.0..=self.tau_p).contains(&tau) && (1.0..=self.sigma_p).contains(&sigma)
    }
}

/// `Δ_p(τ, σ) = (τ + σ)(1 + τ^p)^(-1/p)(1 + σ^p)^(-1/p)`.
pub fn delta(p: BallExponent, point: ModuliPoint) -> Result<f64> {
    point.validate()?;
    Ok(delta_unchecked(p.value(), point.tau, point.sigma))
}

#[inline]
pub(crate) fn delta_unchecked(p: f64, tau: f64, sigma: f64) -> f64 {
    (tau + sigma) * sphere_scale(tau, p) * sphere_scale(sigma, p)
}

/// `σ_p = (2^p - 1)^(1/p)`, evaluated as `2 (1 - 2^-p)^(1/p)`.
pub fn sigma_p(p: BallExponent) -> f64 {
    let p = p.value();
    2.0 * ((-(p * -std::f64::consts::LN_2).exp()).ln_1p() / p).exp()
}

/// `F(τ) = 2(1 - τ)^p - (1 + τ^p)`; its unique root in `[0, 1)` is `τ_p`.
pub fn corner_equation(p: BallExponent, tau: f64) -> f64 {
    let p = p.value();
    let lhs = if tau >= 1.0 {
        0.0
    } else {
        2.0 * (p * (-tau).ln_1p()).exp()
    };
    lhs - (1.0 + pow_nonneg(tau, p))
}

/// Root of [`corner_equation`] together with its residual and cost.
pub fn tau_p_root(p: BallExponent, tol: f64) -> Result<Root> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be > 0")));
    }
    let f = |t: f64| corner_equation(p, t);

    let mut sign_changes = 0;
    let mut prev = f(0.0);
    for i in 1..UNIQUENESS_SCAN_POINTS {
        let cur = f(i as f64 / UNIQUENESS_SCAN_POINTS as f64);
        if (cur < 0.0) != (prev < 0.0) {
            sign_changes += 1;
        }
        prev = cur;
    }
    if sign_changes > 1 {
        return Err(Error::MultipleRoots { sign_changes });
    }

    bisect_then_secant(f, 0.0, 1.0, f(0.0), f(1.0), tol, CORNER_SWITCH_WIDTH, CORNER_MAX_ITER)
}

/// `τ_p`: the root in `[0, 1)` of `2(1 - τ)^p = 1 + τ^p`.
pub fn tau_p(p: BallExponent, tol: f64) -> Result<f64> {
    tau_p_root(p, tol).map(|r| r.x)
}

pub fn domain_bounds(p: BallExponent, tol: f64) -> Result<DomainBounds> {
    let root = tau_p_root(p, tol)?;
    Ok(DomainBounds {
        tau_p: root.x,
        sigma_p: sigma_p(p),
        tau_p_residual: root.fx,
    })
}

/// `Δ_p(0, σ_p) = (1 - 2^-p)^(1/p)`.
pub fn left_corner_value(p: BallExponent) -> f64 {
    let p = p.value();
    ((-(-p * std::f64::consts::LN_2).exp()).ln_1p() / p).exp()
}

/// `Δ_p(τ_p, 1) = 2^(-2/p) (1 + τ_p)/(1 - τ_p)`.
pub fn right_corner_value(p: BallExponent, tau_p: f64) -> f64 {
    (-2.0 * std::f64::consts::LN_2 / p.value()).exp() * (1.0 + tau_p) / (1.0 - tau_p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(p: f64) -> BallExponent {
        BallExponent::new(p).unwrap()
    }

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn exponent_validation() {
        assert!(BallExponent::new(1.0).is_err());
        assert!(BallExponent::new(0.5).is_err());
        assert!(BallExponent::new(600.0).is_err());
        assert!(BallExponent::new(f64::NAN).is_err());
        assert!(BallExponent::new(512.0).is_ok());
        assert!(BallExponent::new(1.0001).is_ok());
    }

    #[test]
    fn delta_examples() {
        let d = delta(bp(2.0), ModuliPoint::new(0.0, SQRT3)).unwrap();
        assert!((d - SQRT3 / 2.0).abs() < 1e-15);
        let d = delta(bp(2.0), ModuliPoint::new(2.0 - SQRT3, 1.0)).unwrap();
        assert!((d - SQRT3 / 2.0).abs() < 1e-15);
        for p in [1.5, 2.0, 7.0, 512.0] {
            assert_eq!(delta(bp(p), ModuliPoint::new(0.0, 0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_rejects_bad_points() {
        let err = delta(bp(2.0), ModuliPoint::new(f64::NAN, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteInput { name: "tau", .. }));
        let err = delta(bp(2.0), ModuliPoint::new(0.0, f64::INFINITY)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteInput { name: "sigma", .. }));
        assert!(delta(bp(2.0), ModuliPoint::new(-0.1, 1.0)).is_err());
    }

    #[test]
    fn sigma_p_examples() {
        assert!((sigma_p(bp(2.0)) - SQRT3).abs() < 1e-15);
        assert!((sigma_p(bp(3.0)) - 7f64.cbrt()).abs() < 1e-15);
        assert!((sigma_p(bp(1.0001)) - 1.0).abs() < 1e-3);
        let big = sigma_p(bp(512.0));
        assert!(big <= 2.0 && big > 1.999_999);
    }

    #[test]
    fn tau_p_examples() {
        let r = tau_p_root(bp(2.0), 1e-12).unwrap();
        assert!((r.x - (2.0 - SQRT3)).abs() < 1e-12);
        assert!(r.fx.abs() <= 1e-12);
        assert!((tau_p(bp(1.0001), 1e-12).unwrap() - 1.0 / 3.0).abs() < 1e-3);
        assert!(tau_p_root(bp(2.0), 0.0).is_err());
    }

    #[test]
    fn tau_p_at_large_exponent() {
        let r = tau_p_root(bp(512.0), 1e-12).unwrap();
        assert!(r.fx.abs() <= 1e-12);
        // 2(1 - t)^p ≈ 1 gives t ≈ ln 2 / p
        assert!((r.x - std::f64::consts::LN_2 / 512.0).abs() < 1e-5);
    }

    #[test]
    fn tau_p_decreases_in_p() {
        let taus: Vec<f64> = [1.1, 1.5, 2.0, 3.0, 5.0, 10.0]
            .iter()
            .map(|&p| tau_p(bp(p), 1e-12).unwrap())
            .collect();
        assert!(taus.windows(2).all(|w| w[1] < w[0]), "{taus:?}");
    }

    #[test]
    fn bounds_examples() {
        let b = domain_bounds(bp(2.0), 1e-12).unwrap();
        assert!((b.tau_p - 0.267_949_192_4).abs() < 1e-9);
        assert!((b.sigma_p - 1.732_050_807_6).abs() < 1e-9);
        assert!(b.contains(0.1, 1.5));
        assert!(!b.contains(0.3, 1.5));
        let b5 = domain_bounds(bp(5.0), 1e-12).unwrap();
        assert!((0.0..1.0).contains(&b5.tau_p));
        assert!(b5.sigma_p >= 1.0 && b5.sigma_p < 2.0);
        assert!((b5.sigma_p - 31f64.powf(0.2)).abs() < 1e-14);
    }

    #[test]
    fn corner_closed_forms() {
        for p in [1.1, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0, 100.0] {
            let p = bp(p);
            let b = domain_bounds(p, 1e-12).unwrap();
            let left = delta(p, ModuliPoint::new(0.0, b.sigma_p)).unwrap();
            assert!((left - left_corner_value(p)).abs() < 1e-12);
            let right = delta(p, ModuliPoint::new(b.tau_p, 1.0)).unwrap();
            assert!((right - right_corner_value(p, b.tau_p)).abs() < 1e-10);
        }
    }

    #[test]
    fn in_domain_rejects_outside_points() {
        let b = domain_bounds(bp(2.0), 1e-12).unwrap();
        assert!(ModuliPoint::in_domain(0.1, 1.5, &b).is_ok());
        assert!(ModuliPoint::in_domain(0.1, 0.9, &b).is_err());
    }
}
