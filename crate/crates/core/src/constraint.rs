//! The boundary-lattice-point constraint `A^p + B^p = 1` and its solution
//! `σ(τ)`.
//!
//! With `c(t) = (1 + t^p)^(-1/p)` the two generators of the lattice are
//! `c(τ)(1, τ)` and `c(σ)(-1, σ)`; their sum is `(A, B)` with
//!
//! ```text
//! A = c(τ) - c(σ)        B = τ c(τ) + σ c(σ)
//! ```
//!
//! and the constraint asks that this sum lies on the unit sphere too.
//! Solving `B = (1 - A^p)^(1/p)` for the `σ` inside `B` gives the fixed-point
//! map used by [`solve_sigma_fixed_point`]:
//!
//! ```text
//! σ ← (1 + σ^p)^(1/p) · ((1 - A(σ)^p)^(1/p) - τ c(τ))
//! ```

use crate::error::{Error, Result};
use crate::power::{signed_pow, sphere_scale};
use crate::rootfind::bisect;
use crate::surface::{domain_bounds, BallExponent, DomainBounds, ModuliPoint, DEFAULT_CORNER_TOL};

/// Slack allowed outside `[1, σ_p]` before the fixed point is declared divergent.
pub const RANGE_SLACK: f64 = 1e-9;

const SCAN_POINTS: usize = 64;
const MIN_DAMPING: f64 = 1.0 / 16.0;
const OSCILLATION_LIMIT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintTerms {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iterations: usize,
    /// Initial blend factor in `(0, 1]`; halved on oscillation down to 1/16.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_residual: 1e-12,
            tol_step: 1e-14,
            max_iterations: 200,
            damping: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.tol_residual > 0.0 && self.tol_residual.is_finite()) {
            return bad("tol_residual must be a positive finite number");
        }
        if !(self.tol_step > 0.0 && self.tol_step.is_finite()) {
            return bad("tol_step must be a positive finite number");
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be >= 1");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveMethod {
    FixedPoint,
    Bisection,
    FixedPointThenBisection,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::FixedPoint => "fixed_point",
            SolveMethod::Bisection => "bisection",
            SolveMethod::FixedPointThenBisection => "fixed_point_then_bisection",
        }
    }
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveResult {
    pub sigma: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Spacing of the `τ` grid used when tracing a level curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridSpacing {
    #[default]
    Uniform,
    /// Cosine-spaced nodes, denser near both corners.
    Cosine,
}

impl GridSpacing {
    /// Node `i` of an `n`-point grid on `[0, end]`. The last node is exactly `end`.
    pub fn node(self, i: usize, n: usize, end: f64) -> f64 {
        if i + 1 == n {
            return end;
        }
        let s = i as f64 / (n - 1) as f64;
        match self {
            GridSpacing::Uniform => s * end,
            GridSpacing::Cosine => 0.5 * end * (1.0 - (std::f64::consts::PI * s).cos()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPoint {
    pub tau: f64,
    pub sigma: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub p: BallExponent,
    pub points: Vec<LevelPoint>,
}

/// `(A, B)` at `(τ, σ)`.
pub fn terms(p: BallExponent, point: ModuliPoint) -> Result<ConstraintTerms> {
    point.validate()?;
    Ok(terms_unchecked(p.value(), point.tau, point.sigma))
}

#[inline]
fn terms_unchecked(p: f64, tau: f64, sigma: f64) -> ConstraintTerms {
    let ct = sphere_scale(tau, p);
    let cs = sphere_scale(sigma, p);
    ConstraintTerms {
        a: ct - cs,
        b: tau * ct + sigma * cs,
    }
}

/// `A^p + B^p - 1` at `(τ, σ)`.
///
/// A negative `A` is only admitted for integer `p`; inside the domain
/// `σ >= 1 > τ_p >= τ` keeps `A` positive.
pub fn residual(p: BallExponent, point: ModuliPoint) -> Result<f64> {
    point.validate()?;
    residual_unchecked(p.value(), point.tau, point.sigma)
}

fn residual_unchecked(p: f64, tau: f64, sigma: f64) -> Result<f64> {
    let t = terms_unchecked(p, tau, sigma);
    let ap = signed_pow(t.a, p).ok_or(Error::NegativeBase { base: t.a, p })?;
    let bp = signed_pow(t.b, p).ok_or(Error::NegativeBase { base: t.b, p })?;
    Ok(ap + bp - 1.0)
}

/// Constraint solver for one exponent, with the domain rectangle resolved once.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintSolver {
    p: BallExponent,
    bounds: DomainBounds,
    config: SolverConfig,
}

impl ConstraintSolver {
    pub fn new(p: BallExponent, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let bounds = domain_bounds(p, DEFAULT_CORNER_TOL)?;
        Ok(ConstraintSolver { p, bounds, config })
    }

    pub fn with_bounds(p: BallExponent, bounds: DomainBounds, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(ConstraintSolver { p, bounds, config })
    }

    pub fn exponent(&self) -> BallExponent {
        self.p
    }

    pub fn bounds(&self) -> &DomainBounds {
        &self.bounds
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if !tau.is_finite() {
            return Err(Error::NonFiniteInput {
                name: "tau",
                value: tau,
            });
        }
        if !(0.0..=self.bounds.tau_p).contains(&tau) {
            return Err(Error::InvalidArgument(format!(
                "tau = {tau} outside [0, tau_p = {}]",
                self.bounds.tau_p
            )));
        }
        Ok(())
    }

    fn residual_at(&self, tau: f64, sigma: f64) -> Result<f64> {
        residual_unchecked(self.p.value(), tau, sigma)
    }

    /// Corner-interpolated seed `σ_p (1 - τ/τ_p) + τ/τ_p`.
    pub fn initial_guess(&self, tau: f64) -> f64 {
        let s = tau / self.bounds.tau_p;
        self.bounds.sigma_p * (1.0 - s) + s
    }

    /// One application of the fixed-point map at `σ`.
    pub fn fixed_point_map(&self, tau: f64, sigma: f64) -> Result<f64> {
        let p = self.p.value();
        let ct = sphere_scale(tau, p);
        let cs = sphere_scale(sigma, p);
        let a = ct - cs;
        let ap = signed_pow(a, p).ok_or(Error::NegativeBase { base: a, p })?;
        let b = (1.0 - ap).powf(1.0 / p);
        Ok((b - tau * ct) / cs)
    }

    pub fn fixed_point(&self, tau: f64, sigma0: f64) -> Result<SolveResult> {
        self.check_tau(tau)?;
        if !(1.0..=self.bounds.sigma_p).contains(&sigma0) {
            return Err(Error::InvalidArgument(format!(
                "sigma0 = {sigma0} outside [1, sigma_p = {}]",
                self.bounds.sigma_p
            )));
        }
        let cfg = &self.config;
        let (lo, hi) = (1.0 - RANGE_SLACK, self.bounds.sigma_p + RANGE_SLACK);
        let mut damping = cfg.damping;
        let mut sigma = sigma0;
        let mut last_step = 0.0f64;
        let mut alternations = 0;
        let mut residual = f64::NAN;

        for iteration in 1..=cfg.max_iterations {
            let mapped = self.fixed_point_map(tau, sigma).map_err(|_| Error::Diverged {
                iteration,
                iterate: sigma,
            })?;
            let next = (1.0 - damping) * sigma + damping * mapped;
            if !next.is_finite() || next < lo || next > hi {
                return Err(Error::Diverged {
                    iteration,
                    iterate: next,
                });
            }
            let step = next - sigma;
            if step != 0.0 && last_step != 0.0 && step.signum() != last_step.signum() {
                alternations += 1;
                if alternations >= OSCILLATION_LIMIT && damping > MIN_DAMPING {
                    damping = (damping * 0.5).max(MIN_DAMPING);
                    alternations = 0;
                }
            } else {
                alternations = 0;
            }
            last_step = step;
            sigma = next;

            if step.abs() <= cfg.tol_step {
                let clamped = sigma.clamp(1.0, self.bounds.sigma_p);
                residual = self.residual_at(tau, clamped)?;
                if residual.abs() <= cfg.tol_residual {
                    return Ok(SolveResult {
                        sigma: clamped,
                        residual,
                        iterations: iteration,
                        method: SolveMethod::FixedPoint,
                    });
                }
            }
        }
        if residual.is_nan() {
            residual = self.residual_at(tau, sigma)?;
        }
        Err(Error::NoConvergence {
            iterations: cfg.max_iterations,
            residual,
        })
    }

    pub fn bisection(&self, tau: f64) -> Result<SolveResult> {
        self.check_tau(tau)?;
        let cfg = &self.config;
        let sigma_p = self.bounds.sigma_p;
        let f = |s: f64| self.residual_at(tau, s).unwrap_or(f64::NAN);

        let (f_lo, f_hi) = (self.residual_at(tau, 1.0)?, self.residual_at(tau, sigma_p)?);
        let (a, b, fa, fb) =
            if f_lo.abs() <= cfg.tol_residual || f_hi.abs() <= cfg.tol_residual || (f_lo < 0.0) != (f_hi < 0.0) {
                (1.0, sigma_p, f_lo, f_hi)
            } else {
                let mut bracket = None;
                let mut changes = 0;
                let mut prev = (1.0, f_lo);
                for i in 1..SCAN_POINTS {
                    let s = 1.0 + (sigma_p - 1.0) * i as f64 / (SCAN_POINTS - 1) as f64;
                    let fs = if i + 1 == SCAN_POINTS { f_hi } else { f(s) };
                    if (fs < 0.0) != (prev.1 < 0.0) {
                        changes += 1;
                        bracket.get_or_insert((prev.0, s, prev.1, fs));
                    }
                    prev = (s, fs);
                }
                match (changes, bracket) {
                    (1, Some(br)) => br,
                    (0, _) => return Err(Error::NoRootInBracket { tau }),
                    (n, _) => return Err(Error::MultipleRoots { sign_changes: n }),
                }
            };

        let root = bisect(f, a, b, fa, fb, cfg.tol_residual, cfg.max_iterations)?;
        Ok(SolveResult {
            sigma: root.x,
            residual: root.fx,
            iterations: root.iterations,
            method: SolveMethod::Bisection,
        })
    }

    /// Fixed point from `warm_start` (or the corner interpolation), falling
    /// back to bisection when it diverges or stalls.
    pub fn solve(&self, tau: f64, warm_start: Option<f64>) -> Result<SolveResult> {
        self.check_tau(tau)?;
        let seed = warm_start
            .filter(|s| s.is_finite())
            .unwrap_or_else(|| self.initial_guess(tau))
            .clamp(1.0, self.bounds.sigma_p);
        match self.fixed_point(tau, seed) {
            Ok(r) => Ok(r),
            Err(fp_err) => {
                let spent = match fp_err {
                    Error::Diverged { iteration, .. } => iteration,
                    _ => self.config.max_iterations,
                };
                let mut r = self.bisection(tau)?;
                r.iterations += spent;
                r.method = SolveMethod::FixedPointThenBisection;
                Ok(r)
            }
        }
    }

    /// Solves `σ(τ_i)` along a grid of `[0, τ_p]`, each solve seeded by the
    /// previous one.
    pub fn trace(&self, n_points: usize, spacing: GridSpacing) -> Result<LevelCurve> {
        if n_points < 2 {
            return Err(Error::InsufficientPoints {
                needed: 2,
                got: n_points,
            });
        }
        let mut points = Vec::with_capacity(n_points);
        let mut warm = None;
        for i in 0..n_points {
            let tau = spacing.node(i, n_points, self.bounds.tau_p);
            let r = self.solve(tau, warm).map_err(|e| e.at_tau(tau))?;
            warm = Some(r.sigma);
            points.push(LevelPoint {
                tau,
                sigma: r.sigma,
                residual: r.residual,
                iterations: r.iterations,
                method: r.method,
            });
        }
        Ok(LevelCurve { p: self.p, points })
    }
}

pub fn solve_sigma_fixed_point(p: BallExponent, tau: f64, sigma0: f64, config: SolverConfig) -> Result<SolveResult> {
    ConstraintSolver::new(p, config)?.fixed_point(tau, sigma0)
}

pub fn solve_sigma_bisection(p: BallExponent, tau: f64, config: SolverConfig) -> Result<SolveResult> {
    ConstraintSolver::new(p, config)?.bisection(tau)
}

pub fn solve_sigma(p: BallExponent, tau: f64, config: SolverConfig) -> Result<SolveResult> {
    ConstraintSolver::new(p, config)?.solve(tau, None)
}

pub fn trace_level_curve(p: BallExponent, n_points: usize, config: SolverConfig) -> Result<LevelCurve> {
    ConstraintSolver::new(p, config)?.trace(n_points, GridSpacing::Uniform)
}
