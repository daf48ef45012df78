//! Minimization of `Δ_p` along the constraint curve and the resulting curve
//! of minima over `p`.
//!
//! Along the constraint `σ = σ(τ)` the surface restricts to the scalar
//! objective `g_p(τ) = Δ_p(τ, σ(τ))` on `[0, τ_p]`. Its two endpoint values,
//! the branches `Δ_p(0, σ_p)` and `Δ_p(τ_p, 1)`, have closed forms.

use std::thread;

use crate::constraint::{ConstraintSolver, SolverConfig};
use crate::convexity::{
    check_monotone_one_sided, is_convex_on_grid, phi3, MonotoneViolation, ScalarFunction, TripleCheck,
};
use crate::error::{Error, Result};
use crate::surface::{
    delta_unchecked, domain_bounds, left_corner_value, right_corner_value, BallExponent, DEFAULT_CORNER_TOL,
};

pub const DEFAULT_GRID_N: usize = 256;
pub const MIN_GRID_N: usize = 16;
/// An interior minimum must beat the best corner by more than this to win.
pub const CORNER_TIE_TOL: f64 = 1e-12;
/// Golden-section stops once the bracket is narrower than this times `τ_p`.
pub const REFINE_REL_WIDTH: f64 = 1e-10;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const CROSSING_MAX_ITER: usize = 200;

/// A point of the constraint curve with its surface value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub tau: f64,
    pub sigma: f64,
    pub delta: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Interior,
    LeftCorner,
    RightCorner,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Interior => "interior",
            Boundary::LeftCorner => "left_corner",
            Boundary::RightCorner => "right_corner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinResult {
    pub tau_star: f64,
    pub sigma_star: f64,
    pub delta_star: f64,
    pub residual: f64,
    pub at_boundary: Boundary,
    pub evaluations: usize,
}

/// `g_p` bound to one exponent and solver configuration.
pub struct RestrictedObjective {
    solver: ConstraintSolver,
    evaluations: usize,
}

impl RestrictedObjective {
    pub fn new(p: BallExponent, config: SolverConfig) -> Result<Self> {
        Ok(RestrictedObjective {
            solver: ConstraintSolver::new(p, config)?,
            evaluations: 0,
        })
    }

    pub fn solver(&self) -> &ConstraintSolver {
        &self.solver
    }

    pub fn tau_p(&self) -> f64 {
        self.solver.bounds().tau_p
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn eval(&mut self, tau: f64, warm_start: Option<f64>) -> Result<CurvePoint> {
        let r = self.solver.solve(tau, warm_start).map_err(|e| e.at_tau(tau))?;
        self.evaluations += 1;
        Ok(CurvePoint {
            tau,
            sigma: r.sigma,
            delta: delta_unchecked(self.solver.exponent().value(), tau, r.sigma),
            residual: r.residual,
        })
    }

    /// The two corners, with `σ` and `Δ` from their closed forms.
    pub fn corners(&self) -> (CurvePoint, CurvePoint) {
        let p = self.solver.exponent();
        let b = self.solver.bounds();
        let left = CurvePoint {
            tau: 0.0,
            sigma: b.sigma_p,
            delta: left_corner_value(p),
            residual: crate::constraint::residual(p, crate::ModuliPoint::new(0.0, b.sigma_p)).unwrap_or(f64::NAN),
        };
        let right = CurvePoint {
            tau: b.tau_p,
            sigma: 1.0,
            delta: right_corner_value(p, b.tau_p),
            residual: crate::constraint::residual(p, crate::ModuliPoint::new(b.tau_p, 1.0)).unwrap_or(f64::NAN),
        };
        (left, right)
    }
}

/// `(σ(τ), g_p(τ))`.
pub fn restricted_objective(p: BallExponent, tau: f64, config: SolverConfig) -> Result<(f64, f64)> {
    let mut g = RestrictedObjective::new(p, config)?;
    let pt = g.eval(tau, None)?;
    Ok((pt.sigma, pt.delta))
}

/// `(Δ_p(0, σ_p), Δ_p(τ_p, 1))` from their closed forms.
pub fn endpoint_values(p: BallExponent) -> Result<(f64, f64)> {
    let bounds = domain_bounds(p, DEFAULT_CORNER_TOL)?;
    Ok((left_corner_value(p), right_corner_value(p, bounds.tau_p)))
}

/// Golden-section search for a minimum of `g` on `[a, b]`, seeded with
/// `warm` for the constraint solves.
fn golden_section(g: &mut RestrictedObjective, mut a: f64, mut b: f64, warm: f64, width: f64) -> Result<CurvePoint> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = g.eval(c, Some(warm))?;
    let mut fd = g.eval(d, Some(fc.sigma))?;
    while b - a > width {
        if fc.delta <= fd.delta {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g.eval(c, Some(fd.sigma))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g.eval(d, Some(fc.sigma))?;
        }
    }
    Ok(if fc.delta <= fd.delta { fc } else { fd })
}

/// Minimum of `g_p` over `[0, τ_p]`.
///
/// `g_p` is sampled on `grid_n` uniform nodes, every local minimum of the
/// samples (endpoints included) is refined by golden-section search, and the
/// best candidate wins. Both corners are always candidates and win ties
/// within [`CORNER_TIE_TOL`].
pub fn minimize_on_curve(p: BallExponent, config: SolverConfig, grid_n: usize) -> Result<MinResult> {
    if grid_n < MIN_GRID_N {
        return Err(Error::InvalidArgument(format!(
            "grid_n = {grid_n} must be >= {MIN_GRID_N}"
        )));
    }
    let mut g = RestrictedObjective::new(p, config)?;
    let tau_p = g.tau_p();
    let (left, right) = g.corners();

    let mut samples = Vec::with_capacity(grid_n);
    samples.push(left);
    let mut warm = left.sigma;
    for i in 1..grid_n - 1 {
        let tau = tau_p * i as f64 / (grid_n - 1) as f64;
        let pt = g.eval(tau, Some(warm))?;
        warm = pt.sigma;
        samples.push(pt);
    }
    samples.push(right);

    let width = REFINE_REL_WIDTH * tau_p;
    let mut interior = Vec::new();
    for i in 0..grid_n {
        let here = samples[i].delta;
        let left_ok = i == 0 || here <= samples[i - 1].delta;
        let right_ok = i + 1 == grid_n || here <= samples[i + 1].delta;
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = samples[i.saturating_sub(1)].tau;
        let hi = samples[(i + 1).min(grid_n - 1)].tau;
        interior.push(golden_section(&mut g, lo, hi, samples[i].sigma, width)?);
    }

    let (corner, corner_side) = if right.delta < left.delta {
        (right, Boundary::RightCorner)
    } else {
        (left, Boundary::LeftCorner)
    };
    let mut best = (corner, corner_side);
    for cand in interior {
        if cand.delta < best.0.delta - CORNER_TIE_TOL || (best.1 == Boundary::Interior && cand.delta < best.0.delta) {
            best = (cand, Boundary::Interior);
        }
    }
    let (pt, at_boundary) = best;
    Ok(MinResult {
        tau_star: pt.tau,
        sigma_star: pt.sigma,
        delta_star: pt.delta,
        residual: pt.residual,
        at_boundary,
        evaluations: g.evaluations(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub p: f64,
    pub tau_star: f64,
    pub sigma_star: f64,
    pub delta_star: f64,
    pub at_boundary: Boundary,
    pub branch_left: f64,
    pub branch_right: f64,
}

/// One node of a sweep; failures are kept in place rather than aborting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub p: f64,
    pub record: Result<SweepRecord>,
}

fn p_grid(p_min: f64, p_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                p_max
            } else {
                p_min + (p_max - p_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn check_p_range(p_min: f64, p_max: f64) -> Result<()> {
    BallExponent::new(p_min)?;
    BallExponent::new(p_max)?;
    if p_min >= p_max {
        return Err(Error::InvalidArgument(format!(
            "p_min = {p_min} must be < p_max = {p_max}"
        )));
    }
    Ok(())
}

fn sweep_point(p: f64, config: SolverConfig, grid_n: usize) -> Result<SweepRecord> {
    let bp = BallExponent::new(p)?;
    let m = minimize_on_curve(bp, config, grid_n)?;
    let (branch_left, branch_right) = endpoint_values(bp)?;
    Ok(SweepRecord {
        p,
        tau_star: m.tau_star,
        sigma_star: m.sigma_star,
        delta_star: m.delta_star,
        at_boundary: m.at_boundary,
        branch_left,
        branch_right,
    })
}

/// Minimizes `g_p` for `steps` uniformly spaced `p` in `[p_min, p_max]`.
///
/// Nodes are processed on worker threads; the output is ordered by `p` and
/// does not depend on scheduling.
pub fn sweep(p_min: f64, p_max: f64, steps: usize, config: SolverConfig, grid_n: usize) -> Result<Vec<SweepEntry>> {
    check_p_range(p_min, p_max)?;
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps = {steps} must be >= 2")));
    }
    if grid_n < MIN_GRID_N {
        return Err(Error::InvalidArgument(format!(
            "grid_n = {grid_n} must be >= {MIN_GRID_N}"
        )));
    }
    config.validate()?;

    let ps = p_grid(p_min, p_max, steps);
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(steps);
    let chunk = steps.div_ceil(workers);
    let entries = thread::scope(|s| {
        let handles: Vec<_> = ps
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&p| SweepEntry {
                            p,
                            record: sweep_point(p, config, grid_n),
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect::<Vec<_>>()
    });
    Ok(entries)
}

/// `h(p) = Δ_p(0, σ_p) - Δ_p(τ_p, 1)`.
pub fn branch_difference(p: f64) -> Result<f64> {
    let (l, r) = endpoint_values(BallExponent::new(p)?)?;
    Ok(l - r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEstimate {
    pub p0: f64,
    /// Scan bracket the root was isolated in.
    pub bracket: (f64, f64),
    pub difference_residual: f64,
    pub iterations: usize,
}

/// Roots of [`branch_difference`] on `[p_min, p_max]`.
///
/// `h` is sampled on `scan_n` uniform nodes and every sign change is
/// bisected. Bisection runs until the bracket can no longer shrink, so the
/// reported root is as sharp as the evaluation noise of `h` allows; `tol`
/// bounds the accepted `|h(p0)|`.
pub fn find_crossings(p_min: f64, p_max: f64, scan_n: usize, tol: f64) -> Result<Vec<CrossingEstimate>> {
    check_p_range(p_min, p_max)?;
    if scan_n < 8 {
        return Err(Error::InvalidArgument(format!("scan_n = {scan_n} must be >= 8")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be > 0")));
    }
    let ps = p_grid(p_min, p_max, scan_n);
    let hs = ps.iter().map(|&p| branch_difference(p)).collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    for i in 0..scan_n {
        if hs[i] == 0.0 {
            out.push(CrossingEstimate {
                p0: ps[i],
                bracket: (ps[i], ps[i]),
                difference_residual: 0.0,
                iterations: 0,
            });
            continue;
        }
        if i + 1 == scan_n || hs[i + 1] == 0.0 || (hs[i] < 0.0) == (hs[i + 1] < 0.0) {
            continue;
        }
        let (mut lo, mut hi, mut hlo) = (ps[i], ps[i + 1], hs[i]);
        let mut best = if hs[i].abs() <= hs[i + 1].abs() {
            (lo, hs[i])
        } else {
            (hi, hs[i + 1])
        };
        let mut iterations = 0;
        while iterations < CROSSING_MAX_ITER {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            iterations += 1;
            let hm = branch_difference(mid)?;
            if hm.abs() <= best.1.abs() {
                best = (mid, hm);
            }
            if hm == 0.0 {
                break;
            }
            if (hm < 0.0) == (hlo < 0.0) {
                lo = mid;
                hlo = hm;
            } else {
                hi = mid;
            }
        }
        if best.1.abs() <= tol {
            out.push(CrossingEstimate {
                p0: best.0,
                bracket: (ps[i], ps[i + 1]),
                difference_residual: best.1,
                iterations,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub tau: f64,
    pub sigma: f64,
    pub delta: f64,
    /// `φ3` of the consecutive triple centred here; absent at the ends.
    pub phi3: Option<f64>,
    pub d_left: Option<f64>,
    pub d_right: Option<f64>,
}

/// Convexity characterization of `g_p` on a uniform grid of `[0, τ_p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityProfile {
    pub p: f64,
    pub samples: Vec<ProfileSample>,
    pub grid_convex: bool,
    pub grid_witness: Option<[f64; 3]>,
    /// `None` when no grid node has room for the derivative steps, or the
    /// derivative limits are too noisy to settle.
    pub monotone_one_sided: Option<bool>,
    pub monotone_witness: Option<MonotoneViolation>,
}

/// Records whether `g_p` looks convex on `grid_n` nodes, by both criteria.
pub fn convexity_profile(p: BallExponent, grid_n: usize, config: SolverConfig) -> Result<ConvexityProfile> {
    if grid_n < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: grid_n });
    }
    let solver = ConstraintSolver::new(p, config)?;
    let tau_p = solver.bounds().tau_p;
    let pv = p.value();
    let g = |tau: f64| {
        solver
            .solve(tau, None)
            .map(|r| delta_unchecked(pv, tau, r.sigma))
            .unwrap_or(f64::NAN)
    };
    let f = ScalarFunction::new(g, 0.0, tau_p)?;

    let grid: Vec<f64> = (0..grid_n)
        .map(|i| {
            if i + 1 == grid_n {
                tau_p
            } else {
                tau_p * i as f64 / (grid_n - 1) as f64
            }
        })
        .collect();
    let mut samples = Vec::with_capacity(grid_n);
    for &tau in &grid {
        let r = solver.solve(tau, None).map_err(|e| e.at_tau(tau))?;
        samples.push(ProfileSample {
            tau,
            sigma: r.sigma,
            delta: delta_unchecked(pv, tau, r.sigma),
            phi3: None,
            d_left: None,
            d_right: None,
        });
    }
    for i in 1..grid_n - 1 {
        samples[i].phi3 = Some(phi3(&f, grid[i - 1], grid[i], grid[i + 1])?);
    }
    let verdict = is_convex_on_grid(&f, &grid, TripleCheck::Consecutive)?;

    let h0 = 1e-2;
    let inner: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&t| t - h0 >= 0.0 && t + h0 <= tau_p)
        .collect();
    let (monotone_one_sided, monotone_witness) = if inner.len() >= 2 {
        match check_monotone_one_sided(&f, &inner) {
            Ok(m) => {
                for d in &m.derivatives {
                    if let Some(s) = samples.iter_mut().find(|s| s.tau == d.x) {
                        s.d_left = Some(d.left);
                        s.d_right = Some(d.right);
                    }
                }
                (Some(m.monotone), m.witness)
            }
            Err(Error::UnstableLimit { .. }) => (None, None),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    Ok(ConvexityProfile {
        p: pv,
        samples,
        grid_convex: verdict.convex,
        grid_witness: verdict.witness,
        monotone_one_sided,
        monotone_witness,
    })
}
