use minkowski_cohn::constraint::{ConstraintSolver, GridSpacing};
use minkowski_cohn::minima::{convexity_profile, endpoint_values, find_crossings, minimize_on_curve, sweep};
use minkowski_cohn::oracle::admissibility_check;
use minkowski_cohn::surface::{delta, domain_bounds, DEFAULT_CORNER_TOL};
use minkowski_cohn::{BallExponent, ModuliPoint};

use crate::config::RunConfig;
use crate::output::{Table, Value};
use crate::CliError;

fn exponent(p: f64) -> Result<BallExponent, CliError> {
    BallExponent::new(p).map_err(CliError::from)
}

pub fn eval(p: f64, tau: f64, sigma: f64) -> Result<Table, CliError> {
    let d = delta(exponent(p)?, ModuliPoint::new(tau, sigma))?;
    let mut t = Table::new(&["p", "tau", "sigma", "delta"]);
    t.push(vec![p.into(), tau.into(), sigma.into(), d.into()]);
    Ok(t)
}

pub fn bounds(p: f64) -> Result<Table, CliError> {
    let b = domain_bounds(exponent(p)?, DEFAULT_CORNER_TOL)?;
    let mut t = Table::new(&["p", "tau_p", "sigma_p", "tau_p_residual"]);
    t.push(vec![
        p.into(),
        b.tau_p.into(),
        b.sigma_p.into(),
        b.tau_p_residual.into(),
    ]);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum MethodChoice {
    /// Fixed point with bisection fallback.
    #[default]
    Auto,
    FixedPoint,
    Bisection,
}

pub fn solve_sigma(
    p: f64,
    tau: f64,
    method: MethodChoice,
    sigma0: Option<f64>,
    cfg: &RunConfig,
) -> Result<Table, CliError> {
    let solver = ConstraintSolver::new(exponent(p)?, cfg.solver)?;
    let r = match method {
        MethodChoice::Auto => solver.solve(tau, sigma0)?,
        MethodChoice::FixedPoint => solver.fixed_point(tau, sigma0.unwrap_or_else(|| solver.initial_guess(tau)))?,
        MethodChoice::Bisection => solver.bisection(tau)?,
    };
    let mut t = Table::new(&["p", "tau", "sigma", "residual", "iterations", "method"]);
    t.push(vec![
        p.into(),
        tau.into(),
        r.sigma.into(),
        r.residual.into(),
        r.iterations.into(),
        r.method.as_str().into(),
    ]);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Spacing {
    #[default]
    Uniform,
    Cosine,
}

pub fn trace(p: f64, n: usize, spacing: Spacing, cfg: &RunConfig) -> Result<Table, CliError> {
    let bp = exponent(p)?;
    let solver = ConstraintSolver::new(bp, cfg.solver)?;
    let spacing = match spacing {
        Spacing::Uniform => GridSpacing::Uniform,
        Spacing::Cosine => GridSpacing::Cosine,
    };
    let curve = solver.trace(n, spacing)?;
    let mut t = Table::new(&["p", "tau", "sigma", "delta", "residual", "iterations", "method"]);
    for q in curve.points {
        let d = delta(bp, ModuliPoint::new(q.tau, q.sigma))?;
        t.push(vec![
            p.into(),
            q.tau.into(),
            q.sigma.into(),
            d.into(),
            q.residual.into(),
            q.iterations.into(),
            q.method.as_str().into(),
        ]);
    }
    Ok(t)
}

pub fn minimize(p: f64, cfg: &RunConfig) -> Result<Table, CliError> {
    let bp = exponent(p)?;
    let m = minimize_on_curve(bp, cfg.solver, cfg.grid_n)?;
    let (left, right) = endpoint_values(bp)?;
    let mut t = Table::new(&[
        "p",
        "tau_star",
        "sigma_star",
        "delta_star",
        "residual",
        "at_boundary",
        "evaluations",
        "branch_left",
        "branch_right",
    ]);
    t.push(vec![
        p.into(),
        m.tau_star.into(),
        m.sigma_star.into(),
        m.delta_star.into(),
        m.residual.into(),
        m.at_boundary.as_str().into(),
        m.evaluations.into(),
        left.into(),
        right.into(),
    ]);
    Ok(t)
}

/// Rows for every node; the flag is set when any node failed.
pub fn sweep_table(p_min: f64, p_max: f64, steps: usize, cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let entries = sweep(p_min, p_max, steps, cfg.solver, cfg.grid_n)?;
    let mut t = Table::new(&[
        "p",
        "tau",
        "sigma",
        "delta",
        "branch_left",
        "branch_right",
        "at_boundary",
        "error",
    ]);
    let mut failed = false;
    for e in entries {
        match e.record {
            Ok(r) => t.push(vec![
                r.p.into(),
                r.tau_star.into(),
                r.sigma_star.into(),
                r.delta_star.into(),
                r.branch_left.into(),
                r.branch_right.into(),
                r.at_boundary.as_str().into(),
                Value::Empty,
            ]),
            Err(err) => {
                failed = true;
                let mut row = vec![e.p.into()];
                row.extend(std::iter::repeat_n(Value::Empty, 6));
                row.push(err.to_string().into());
                t.push(row);
            }
        }
    }
    Ok((t, failed))
}

pub fn crossing(p_min: f64, p_max: f64, scan_n: usize, tol: f64) -> Result<Table, CliError> {
    let roots = find_crossings(p_min, p_max, scan_n, tol)?;
    let mut t = Table::new(&["p0", "bracket_lo", "bracket_hi", "difference_residual", "iterations"]);
    for r in roots {
        t.push(vec![
            r.p0.into(),
            r.bracket.0.into(),
            r.bracket.1.into(),
            r.difference_residual.into(),
            r.iterations.into(),
        ]);
    }
    Ok(t)
}

/// One `summary` row followed by `violation` and `boundary_hit` rows.
pub fn verify_lattice(p: f64, tau: f64, sigma: f64, range_n: usize) -> Result<Table, CliError> {
    let r = admissibility_check(exponent(p)?, ModuliPoint::new(tau, sigma), range_n)?;
    let mut t = Table::new(&[
        "kind",
        "p",
        "tau",
        "sigma",
        "range_n",
        "m",
        "n",
        "norm_value",
        "determinant",
        "constraint_residual",
        "violations",
        "boundary_hits",
        "admissible",
    ]);
    t.push(vec![
        "summary".into(),
        p.into(),
        tau.into(),
        sigma.into(),
        range_n.into(),
        Value::Empty,
        Value::Empty,
        Value::Empty,
        r.determinant.into(),
        r.constraint_residual.into(),
        r.violations.len().into(),
        r.boundary_hits.len().into(),
        r.is_admissible().into(),
    ]);
    let detail = |kind: &str, m: i64, n: i64, norm: Value| -> Vec<Value> {
        let mut row = vec![kind.into(), p.into(), tau.into(), sigma.into(), range_n.into()];
        row.extend([m.into(), n.into(), norm]);
        row.extend(std::iter::repeat_n(Value::Empty, 5));
        row
    };
    for v in &r.violations {
        t.push(detail("violation", v.m, v.n, v.norm_value.into()));
    }
    for &(m, n) in &r.boundary_hits {
        t.push(detail("boundary_hit", m, n, Value::Empty));
    }
    Ok(t)
}

pub fn convexity_report(p: f64, grid_n: usize, cfg: &RunConfig) -> Result<Table, CliError> {
    let prof = convexity_profile(exponent(p)?, grid_n, cfg.solver)?;
    let mut t = Table::new(&[
        "p",
        "tau",
        "sigma",
        "delta",
        "phi3",
        "d_left",
        "d_right",
        "grid_convex",
        "monotone_one_sided",
    ]);
    for s in &prof.samples {
        t.push(vec![
            p.into(),
            s.tau.into(),
            s.sigma.into(),
            s.delta.into(),
            s.phi3.into(),
            s.d_left.into(),
            s.d_right.into(),
            prof.grid_convex.into(),
            prof.monotone_one_sided.into(),
        ]);
    }
    Ok(t)
}
