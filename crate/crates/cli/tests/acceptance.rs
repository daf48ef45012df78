//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails at the end if any criterion failed.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use minkowski_cohn::convexity::{check_monotone_one_sided, is_convex_on_grid, phi3, ScalarFunction, TripleCheck};
use minkowski_cohn::surface::{domain_bounds, DEFAULT_CORNER_TOL};
use minkowski_cohn::{
    admissibility_check, basis_determinant, delta, grid_min_oracle, lattice_basis, minimize_on_curve, residual,
    BallExponent, ConstraintSolver, GridSpacing, ModuliPoint, SolverConfig,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Row = HashMap<String, String>;

fn mcohn(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_mcohn"))
        .args(args)
        .env_remove("MCOHN_CONFIG")
        .output()
        .expect("spawn mcohn");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn rows(bytes: &[u8]) -> Vec<Row> {
    let mut r = csv::Reader::from_reader(bytes);
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn num(row: &Row, key: &str) -> f64 {
    row[key].parse().unwrap_or(f64::NAN)
}

fn bp(p: f64) -> BallExponent {
    BallExponent::new(p).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn corner_constants() -> Outcome {
    let (code, out) = mcohn(&["bounds", "--p", "2"]);
    let r = &rows(&out)[0];
    let (tau, sigma) = (num(r, "tau_p"), num(r, "sigma_p"));
    let tau_err = (tau - (2.0 - 3f64.sqrt())).abs();
    let sigma_err = (sigma - 3f64.sqrt()).abs();
    let (_, t) = timed(|| domain_bounds(bp(2.0), DEFAULT_CORNER_TOL).unwrap());
    outcome(
        code == 0 && tau_err <= 1e-9 && sigma_err <= 1e-9 && t < Duration::from_millis(10),
        format!("tau_p err {tau_err:.1e}, sigma_p err {sigma_err:.1e}, {t:?}"),
    )
}

fn critical_value() -> Outcome {
    let (code, out) = mcohn(&["minimize", "--p", "2"]);
    let d = num(&rows(&out)[0], "delta_star");
    let err = (d - 3f64.sqrt() / 2.0).abs();
    let (_, t) = timed(|| minimize_on_curve(bp(2.0), SolverConfig::default(), 256).unwrap());
    outcome(
        code == 0 && err <= 1e-7 && t < Duration::from_secs(1),
        format!("delta* = {d}, err {err:.1e}, {t:?}"),
    )
}

fn corner_exactness() -> Outcome {
    let (worst, t) = timed(|| {
        let mut worst = 0f64;
        for p in [1.1, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0] {
            let b = domain_bounds(bp(p), DEFAULT_CORNER_TOL).unwrap();
            let left = residual(bp(p), ModuliPoint::new(0.0, b.sigma_p)).unwrap();
            let right = residual(bp(p), ModuliPoint::new(b.tau_p, 1.0)).unwrap();
            worst = worst.max(left.abs()).max(right.abs());
        }
        worst
    });
    outcome(
        worst <= 1e-10 && t < Duration::from_millis(100),
        format!("max |residual| {worst:.1e}, {t:?}"),
    )
}

fn solver_cross_validation() -> Outcome {
    let ((ok, detail), t) = timed(|| {
        let mut ok = true;
        let mut detail = Vec::new();
        for p in [1.5, 2.0, 3.0] {
            let solver = ConstraintSolver::new(bp(p), SolverConfig::default()).unwrap();
            let tau_p = solver.bounds().tau_p;
            let (mut converged, mut worst) = (0usize, 0f64);
            for i in 0..50 {
                let tau = GridSpacing::Uniform.node(i, 50, tau_p);
                let bis = solver.bisection(tau).unwrap();
                if let Ok(fp) = solver.fixed_point(tau, solver.initial_guess(tau)) {
                    converged += 1;
                    worst = worst.max((fp.sigma - bis.sigma).abs());
                }
                let auto = solver.solve(tau, None).unwrap();
                worst = worst.max((auto.sigma - bis.sigma).abs());
            }
            ok &= converged * 10 >= 50 * 9 && worst <= 1e-8;
            detail.push(format!("p={p}: {converged}/50 converged, max diff {worst:.1e}"));
        }
        (ok, detail.join("; "))
    });
    outcome(ok && t < Duration::from_secs(5), format!("{detail}, {t:?}"))
}

fn oracle_equivalence() -> Outcome {
    let ((worst, detail), t) = timed(|| {
        let mut worst = 0f64;
        let mut detail = Vec::new();
        for p in [1.5, 2.0, 2.5, 3.0, 5.0] {
            let m = minimize_on_curve(bp(p), SolverConfig::default(), 256).unwrap();
            let (_, oracle) = grid_min_oracle(bp(p), 10_000).unwrap();
            let err = (m.delta_star - oracle).abs();
            worst = worst.max(err);
            detail.push(format!("p={p}: {err:.1e}"));
        }
        (worst, detail.join(", "))
    });
    outcome(worst <= 1e-6 && t < Duration::from_secs(30), format!("{detail}, {t:?}"))
}

fn crossing_roots(scan_n: &str) -> Option<Vec<f64>> {
    let (code, out) = mcohn(&["crossing", "--p-min", "1.5", "--p-max", "3.5", "--scan-n", scan_n]);
    (code == 0).then(|| rows(&out).iter().map(|r| num(r, "p0")).collect())
}

fn branch_crossings() -> Outcome {
    let start = Instant::now();
    let (coarse, fine) = match (crossing_roots("64"), crossing_roots("128")) {
        (Some(a), Some(b)) => (a, b),
        _ => return outcome(false, "crossing command failed".into()),
    };
    let t = start.elapsed();
    let at_two = |roots: &[f64]| roots.iter().any(|r| (r - 2.0).abs() <= 1e-8);
    let extra = |roots: &[f64]| -> Vec<f64> { roots.iter().copied().filter(|r| *r > 2.3 && *r < 2.9).collect() };
    let (ec, ef) = (extra(&coarse), extra(&fine));
    let stable = ec.len() == 1 && ef.len() == 1 && (ec[0] - ef[0]).abs() <= 1e-4;
    let only_these = coarse.len() == 2 && fine.len() == 2;
    outcome(
        at_two(&coarse) && at_two(&fine) && stable && only_these && t < Duration::from_secs(10),
        format!("roots {coarse:?} / doubled scan {fine:?}, {t:?}"),
    )
}

fn determinant_identity() -> Outcome {
    let (worst, t) = timed(|| {
        let mut rng = StdRng::seed_from_u64(7);
        let mut worst = 0f64;
        for _ in 0..200 {
            let p = bp(rng.gen_range(1.05..12.0));
            let b = domain_bounds(p, DEFAULT_CORNER_TOL).unwrap();
            let point = ModuliPoint::new(rng.gen_range(0.0..=b.tau_p), rng.gen_range(1.0..=b.sigma_p));
            let det = basis_determinant(&lattice_basis(p, point).unwrap());
            worst = worst.max((det - delta(p, point).unwrap()).abs());
        }
        worst
    });
    outcome(
        worst <= 1e-12 && t < Duration::from_millis(100),
        format!("max |det - delta| {worst:.1e}, {t:?}"),
    )
}

fn corner_admissibility() -> Outcome {
    let ((ok, detail), t) = timed(|| {
        let mut ok = true;
        let mut detail = Vec::new();
        for p in [1.5, 2.0, 3.0, 5.0] {
            let b = domain_bounds(bp(p), DEFAULT_CORNER_TOL).unwrap();
            for point in [ModuliPoint::new(0.0, b.sigma_p), ModuliPoint::new(b.tau_p, 1.0)] {
                let r = admissibility_check(bp(p), point, 5).unwrap();
                let hits = [(1, 0), (0, 1), (1, 1)]
                    .iter()
                    .all(|&(m, n)| r.hits(m, n) && r.hits(-m, -n));
                if !(r.is_admissible() && hits) {
                    ok = false;
                    detail.push(format!("p={p} at ({}, {})", point.tau, point.sigma));
                }
            }
        }
        (ok, detail)
    });
    let detail = if detail.is_empty() {
        "all 8 configurations admissible".to_string()
    } else {
        detail.join(", ")
    };
    outcome(ok && t < Duration::from_secs(1), format!("{detail}, {t:?}"))
}

fn convexity_toolkit() -> Outcome {
    let (checks, t) = timed(|| {
        let mut rng = StdRng::seed_from_u64(11);
        let square = ScalarFunction::unbounded(|x: f64| x * x);
        let linear = ScalarFunction::unbounded(|x: f64| 3.0 * x - 2.0);
        let (mut sq_err, mut lin_err) = (0f64, 0f64);
        for _ in 0..200 {
            let mut xs = [0.0; 3];
            for x in &mut xs {
                *x = rng.gen_range(-10.0..10.0);
            }
            if let Ok(v) = phi3(&square, xs[0], xs[1], xs[2]) {
                sq_err = sq_err.max((v - 1.0).abs());
            }
            if let Ok(v) = phi3(&linear, xs[0], xs[1], xs[2]) {
                lin_err = lin_err.max(v.abs());
            }
        }
        let grid = |a: f64, b: f64, n: usize| -> Vec<f64> {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        let abs = ScalarFunction::new(f64::abs, -1.0, 1.0).unwrap();
        let abs_grid = grid(-0.9, 0.9, 19);
        let abs_grid_ok = is_convex_on_grid(&abs, &abs_grid, TripleCheck::All).unwrap().convex;
        let abs_mono = check_monotone_one_sided(&abs, &abs_grid).unwrap().monotone;
        let sin = ScalarFunction::new(f64::sin, 0.0, std::f64::consts::PI).unwrap();
        let sin_grid = grid(0.1, std::f64::consts::PI - 0.1, 21);
        let sin_grid_ok = is_convex_on_grid(&sin, &sin_grid, TripleCheck::All).unwrap().convex;
        let sin_mono = check_monotone_one_sided(&sin, &sin_grid).unwrap().monotone;
        (sq_err, lin_err, abs_grid_ok, abs_mono, sin_grid_ok, sin_mono)
    });
    let (sq_err, lin_err, abs_grid_ok, abs_mono, sin_grid_ok, sin_mono) = checks;
    let pass = sq_err <= 1e-12
        && lin_err <= 1e-12
        && abs_grid_ok
        && abs_mono
        && !sin_grid_ok
        && !sin_mono
        && t < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "x^2 err {sq_err:.1e}, linear err {lin_err:.1e}, |x| grid/monotone {abs_grid_ok}/{abs_mono}, \
             sin grid/monotone {sin_grid_ok}/{sin_mono}, {t:?}"
        ),
    )
}

fn determinism() -> Outcome {
    let args = ["sweep", "--p-min", "1.5", "--p-max", "3", "--steps", "16"];
    let (c1, a) = mcohn(&args);
    let (c2, b) = mcohn(&args);
    outcome(
        c1 == 0 && c2 == 0 && !a.is_empty() && a == b,
        format!("{} bytes, identical: {}", a.len(), a == b),
    )
}

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("corner constants at p=2", corner_constants),
        ("critical value at p=2", critical_value),
        ("constraint corner exactness", corner_exactness),
        ("solver cross-validation", solver_cross_validation),
        ("oracle equivalence", oracle_equivalence),
        ("branch crossings", branch_crossings),
        ("determinant identity", determinant_identity),
        ("admissibility at critical corners", corner_admissibility),
        ("convexity toolkit", convexity_toolkit),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    let total = start.elapsed();
    let in_budget = total < Duration::from_secs(60);
    println!(
        "[{}] total wall time {total:?}",
        if in_budget { "PASS" } else { "FAIL" }
    );
    assert!(failed.is_empty() && in_budget, "failed criteria: {failed:?}");
}
