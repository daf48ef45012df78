//! Brute-force cross-checks that share no code with the main solve path.
//!
//! Everything here is written directly from the defining formulas with
//! plain `powf` and plain bisection: the lattice basis spanned by two
//! boundary points of the ball, its determinant, enumeration of small
//! lattice vectors, and a dense-grid minimization of the constrained
//! surface.

use crate::error::{Error, Result};
use crate::surface::{BallExponent, ModuliPoint};

/// A lattice vector counts as interior below `1 - INTERIOR_TOL` in the
/// `|x|^p + |y|^p` gauge, and as a boundary hit within `INTERIOR_TOL` of 1.
pub const INTERIOR_TOL: f64 = 1e-9;
pub const DEFAULT_RANGE: usize = 5;
pub const MAX_RANGE: usize = 64;
pub const MIN_ORACLE_GRID: usize = 100;

const BISECTION_CAP: usize = 2000;
const EXACT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBasis {
    pub v1: [f64; 2],
    pub v2: [f64; 2],
}

impl LatticeBasis {
    pub fn point(&self, m: i64, n: i64) -> [f64; 2] {
        let (m, n) = (m as f64, n as f64);
        [m * self.v1[0] + n * self.v2[0], m * self.v1[1] + n * self.v2[1]]
    }
}

/// `|x|^p + |y|^p`.
pub fn gauge(p: f64, v: [f64; 2]) -> f64 {
    v[0].abs().powf(p) + v[1].abs().powf(p)
}

fn scale(p: f64, t: f64) -> f64 {
    (1.0 + t.powf(p)).powf(-1.0 / p)
}

/// Generators `c(τ)(1, τ)` and `c(σ)(-1, σ)` with `c(t) = (1 + t^p)^(-1/p)`.
pub fn lattice_basis(p: BallExponent, point: ModuliPoint) -> Result<LatticeBasis> {
    point.validate()?;
    let p = p.value();
    let (ct, cs) = (scale(p, point.tau), scale(p, point.sigma));
    Ok(LatticeBasis {
        v1: [ct, point.tau * ct],
        v2: [-cs, point.sigma * cs],
    })
}

pub fn basis_determinant(basis: &LatticeBasis) -> f64 {
    basis.v1[0] * basis.v2[1] - basis.v1[1] * basis.v2[0]
}

/// `A^p + B^p - 1` for the sum of the two generators.
fn sum_residual(p: f64, tau: f64, sigma: f64) -> f64 {
    let (ct, cs) = (scale(p, tau), scale(p, sigma));
    gauge(p, [ct - cs, tau * ct + sigma * cs]) - 1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeViolation {
    pub m: i64,
    pub n: i64,
    pub norm_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub p: f64,
    pub point: ModuliPoint,
    pub range_n: usize,
    pub violations: Vec<LatticeViolation>,
    pub boundary_hits: Vec<(i64, i64)>,
    pub determinant: f64,
    /// Residual of the sum-on-sphere condition at `point`.
    pub constraint_residual: f64,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn hits(&self, m: i64, n: i64) -> bool {
        self.boundary_hits.contains(&(m, n))
    }
}

/// Classifies every `m v1 + n v2` with `|m|, |n| <= range_n`, `(m, n) != 0`.
pub fn admissibility_check(p: BallExponent, point: ModuliPoint, range_n: usize) -> Result<AdmissibilityReport> {
    if !(1..=MAX_RANGE).contains(&range_n) {
        return Err(Error::InvalidArgument(format!(
            "range_n = {range_n} must lie in [1, {MAX_RANGE}]"
        )));
    }
    let basis = lattice_basis(p, point)?;
    let pv = p.value();
    let r = range_n as i64;
    let mut violations = Vec::new();
    let mut boundary_hits = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            if m == 0 && n == 0 {
                continue;
            }
            let norm_value = gauge(pv, basis.point(m, n));
            if (norm_value - 1.0).abs() <= INTERIOR_TOL {
                boundary_hits.push((m, n));
            } else if norm_value < 1.0 - INTERIOR_TOL {
                violations.push(LatticeViolation { m, n, norm_value });
            }
        }
    }
    Ok(AdmissibilityReport {
        p: pv,
        point,
        range_n,
        violations,
        boundary_hits,
        determinant: basis_determinant(&basis),
        constraint_residual: sum_residual(pv, point.tau, point.sigma),
    })
}

/// Bisects `f` on `[a, b]` until the bracket stops shrinking or `|f| <= EXACT_TOL`.
fn bisect_to_collapse(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Option<f64> {
    let (fa, fb) = (f(a), f(b));
    if fa.abs() <= EXACT_TOL {
        return Some(a);
    }
    if fb.abs() <= EXACT_TOL {
        return Some(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return None;
    }
    let a_negative = fa < 0.0;
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Dense-grid minimum of `Δ_p(τ, σ(τ))` on `grid_n` uniform nodes of
/// `[0, τ_p]`, with `τ_p` and every `σ(τ)` found by bisection alone.
/// Returns `(τ, Δ)` at the best node.
pub fn grid_min_oracle(p: BallExponent, grid_n: usize) -> Result<(f64, f64)> {
    if grid_n < MIN_ORACLE_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid_n = {grid_n} must be >= {MIN_ORACLE_GRID}"
        )));
    }
    let pv = p.value();
    let tau_p = bisect_to_collapse(|t| 2.0 * (1.0 - t).powf(pv) - 1.0 - t.powf(pv), 0.0, 1.0)
        .ok_or(Error::NoRootInBracket { tau: f64::NAN })?;
    let sigma_p = (2f64.powf(pv) - 1.0).powf(1.0 / pv);

    let mut best = (f64::NAN, f64::INFINITY);
    for i in 0..grid_n {
        let tau = if i + 1 == grid_n {
            tau_p
        } else {
            tau_p * i as f64 / (grid_n - 1) as f64
        };
        let sigma =
            bisect_to_collapse(|s| sum_residual(pv, tau, s), 1.0, sigma_p).ok_or(Error::NoRootInBracket { tau })?;
        let value = (tau + sigma) * scale(pv, tau) * scale(pv, sigma);
        if value < best.1 {
            best = (tau, value);
        }
    }
    Ok(best)
}
