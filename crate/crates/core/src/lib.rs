//! Numerics for the Minkowski-Cohn moduli surface.
//!
//! For a Minkowski ball `D_p: |x|^p + |y|^p <= 1` two boundary points with
//! slopes `τ` and `σ` span a lattice whose determinant is
//! `Δ_p(τ, σ) = (τ + σ)(1 + τ^p)^(-1/p)(1 + σ^p)^(-1/p)`. Requiring that the
//! sum of the generators also lies on the boundary ties `σ` to `τ`; the
//! crate solves that constraint, minimizes `Δ_p` along it and follows the
//! minimum as `p` varies.
//!
//! - [`surface`]: `Δ_p`, the corner constants `τ_p`, `σ_p` and the rectangle `R_p`.
//! - [`constraint`]: the constraint `A^p + B^p = 1` and its solution `σ(τ)`.
//! - [`minima`]: minimization along the constraint curve, sweeps over `p`
//!   and crossings of the two corner branches.
//! - [`convexity`]: divided-difference and one-sided-derivative convexity tests.
//! - [`oracle`]: independent brute-force checks (lattice enumeration, dense grids).

pub mod constraint;
pub mod convexity;
pub mod error;
pub mod minima;
pub mod oracle;
mod power;
mod rootfind;
pub mod surface;

pub use constraint::{
    residual, solve_sigma, solve_sigma_bisection, solve_sigma_fixed_point, terms, trace_level_curve, ConstraintSolver,
    ConstraintTerms, GridSpacing, LevelCurve, LevelPoint, SolveMethod, SolveResult, SolverConfig,
};
pub use error::{Error, Result};
pub use minima::{
    endpoint_values, find_crossings, minimize_on_curve, restricted_objective, sweep, Boundary, CrossingEstimate,
    MinResult, SweepEntry, SweepRecord,
};
pub use oracle::{
    admissibility_check, basis_determinant, grid_min_oracle, lattice_basis, AdmissibilityReport, LatticeBasis,
};
pub use surface::{
    delta, domain_bounds, sigma_p, tau_p, BallExponent, DomainBounds, ModuliPoint, DEFAULT_CORNER_TOL, MAX_EXPONENT,
};
