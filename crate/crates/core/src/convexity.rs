//! Grid-based convexity diagnostics for functions of one variable.
//!
//! Two independent criteria are provided. [`is_convex_on_grid`] checks that
//! every second divided difference `φ3` is non-negative;
//! [`check_monotone_one_sided`] estimates left and right derivatives and
//! checks that they interleave in non-decreasing order. On a convex function
//! both pass, and a concave bump makes both fail.

use crate::error::{Error, Result};

/// Tolerance on `φ3` below zero still accepted as convex.
pub const CONVEXITY_TOL: f64 = 1e-10;
/// Tolerance on the ordering of one-sided derivative estimates.
pub const DERIVATIVE_TOL: f64 = 1e-6;
/// Closer than this, two abscissae count as the same point.
pub const COINCIDENCE_TOL: f64 = 1e-15;

const H0: f64 = 1e-2;
const H_STEPS: usize = 21;
const GROWTH_WINDOW: usize = 5;
const GROWTH_FLOOR: f64 = 1e-6;

/// A real function together with the interval it may be evaluated on.
pub struct ScalarFunction<F> {
    f: F,
    lo: f64,
    hi: f64,
}

impl<F: Fn(f64) -> f64> ScalarFunction<F> {
    /// `lo` and `hi` may be infinite.
    pub fn new(f: F, lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidArgument(format!("empty interval ({lo}, {hi})")));
        }
        Ok(ScalarFunction { f, lo, hi })
    }

    pub fn unbounded(f: F) -> Self {
        ScalarFunction {
            f,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn check(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput { name: "x", value: x });
        }
        if x < self.lo || x > self.hi {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside ({}, {})",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// First divided difference `(f(x1) - f(x2)) / (x1 - x2)`.
pub fn phi2<F: Fn(f64) -> f64>(f: &ScalarFunction<F>, x1: f64, x2: f64) -> Result<f64> {
    f.check(x1)?;
    f.check(x2)?;
    if (x1 - x2).abs() < COINCIDENCE_TOL {
        return Err(Error::CoincidentPoints(x1, x2));
    }
    Ok((f.eval(x1) - f.eval(x2)) / (x1 - x2))
}

/// Second divided difference `(φ2(x1, x3) - φ2(x2, x3)) / (x1 - x2)`.
pub fn phi3<F: Fn(f64) -> f64>(f: &ScalarFunction<F>, x1: f64, x2: f64, x3: f64) -> Result<f64> {
    if (x1 - x2).abs() < COINCIDENCE_TOL {
        return Err(Error::CoincidentPoints(x1, x2));
    }
    Ok((phi2(f, x1, x3)? - phi2(f, x2, x3)?) / (x1 - x2))
}

/// Which triples [`is_convex_on_grid`] inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TripleCheck {
    /// `(x_i, x_{i+1}, x_{i+2})` only; equivalent verdict on a sorted grid.
    #[default]
    Consecutive,
    /// Every `i < j < k`.
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityVerdict {
    pub convex: bool,
    /// First triple with `φ3 < -tol`, in scan order.
    pub witness: Option<[f64; 3]>,
    pub min_phi3: f64,
    pub triples_checked: usize,
}

fn check_grid(grid: &[f64], needed: usize) -> Result<()> {
    if grid.len() < needed {
        return Err(Error::InsufficientPoints {
            needed,
            got: grid.len(),
        });
    }
    if let Some(&x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput { name: "grid", value: x });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    Ok(())
}

pub fn is_convex_on_grid<F: Fn(f64) -> f64>(
    f: &ScalarFunction<F>,
    grid: &[f64],
    mode: TripleCheck,
) -> Result<ConvexityVerdict> {
    check_grid(grid, 3)?;
    let mut verdict = ConvexityVerdict {
        convex: true,
        witness: None,
        min_phi3: f64::INFINITY,
        triples_checked: 0,
    };
    let mut visit = |x1: f64, x2: f64, x3: f64| -> Result<()> {
        let q = phi3(f, x1, x2, x3)?;
        verdict.triples_checked += 1;
        verdict.min_phi3 = verdict.min_phi3.min(q);
        if q < -CONVEXITY_TOL && verdict.witness.is_none() {
            verdict.convex = false;
            verdict.witness = Some([x1, x2, x3]);
        }
        Ok(())
    };
    let n = grid.len();
    match mode {
        TripleCheck::Consecutive => {
            for w in grid.windows(3) {
                visit(w[0], w[1], w[2])?;
            }
        }
        TripleCheck::All => {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        visit(grid[i], grid[j], grid[k])?;
                    }
                }
            }
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedDerivative {
    pub value: f64,
    pub side: Side,
    pub x0: f64,
    pub h_sequence_used: Vec<f64>,
}

/// Estimates `lim φ2(x0 ± h, x0)` as `h → 0+` along `h_k = 10^-2 · 2^-k`.
///
/// The last three quotients are combined by repeated first-order Richardson
/// extrapolation. Fails with [`Error::UnstableLimit`] when the quotients stop
/// settling (their successive changes grow over the last five steps).
pub fn one_sided_derivative<F: Fn(f64) -> f64>(
    f: &ScalarFunction<F>,
    x0: f64,
    side: Side,
) -> Result<OneSidedDerivative> {
    f.check(x0)?;
    f.check(x0 + side.sign() * H0)
        .map_err(|_| Error::InvalidArgument(format!("no room on the {} side of x0 = {x0}", side.as_str())))?;

    let fx0 = f.eval(x0);
    let mut hs = Vec::with_capacity(H_STEPS);
    let mut quotients = Vec::with_capacity(H_STEPS);
    for k in 0..H_STEPS {
        let h = H0 * (-(k as f64)).exp2();
        let x1 = x0 + side.sign() * h;
        if x1 == x0 {
            break;
        }
        hs.push(h);
        quotients.push((f.eval(x1) - fx0) / (x1 - x0));
    }
    if quotients.len() < 3 || quotients.iter().any(|q| !q.is_finite()) {
        return Err(Error::UnstableLimit { x0 });
    }

    let changes: Vec<f64> = quotients.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let tail = &changes[changes.len().saturating_sub(GROWTH_WINDOW)..];
    let last = *quotients.last().unwrap();
    let growing = tail.len() == GROWTH_WINDOW && tail.windows(2).all(|w| w[1] >= w[0]);
    if growing && tail[GROWTH_WINDOW - 1] > GROWTH_FLOOR * last.abs().max(1.0) {
        return Err(Error::UnstableLimit { x0 });
    }

    let n = quotients.len();
    let (d1, d2, d3) = (quotients[n - 3], quotients[n - 2], quotients[n - 1]);
    let value = (8.0 * d3 - 6.0 * d2 + d1) / 3.0;
    Ok(OneSidedDerivative {
        value,
        side,
        x0,
        h_sequence_used: hs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativePair {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

/// Two consecutive entries of the interleaved derivative sequence that
/// are out of order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneViolation {
    pub earlier: (f64, Side, f64),
    pub later: (f64, Side, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    pub witness: Option<MonotoneViolation>,
    pub derivatives: Vec<DerivativePair>,
}

/// Checks `f'(x_i - 0) <= f'(x_i + 0) <= f'(x_{i+1} - 0)` along the grid.
pub fn check_monotone_one_sided<F: Fn(f64) -> f64>(f: &ScalarFunction<F>, grid: &[f64]) -> Result<MonotoneVerdict> {
    check_grid(grid, 2)?;
    let derivatives = grid
        .iter()
        .map(|&x| {
            Ok(DerivativePair {
                x,
                left: one_sided_derivative(f, x, Side::Left)?.value,
                right: one_sided_derivative(f, x, Side::Right)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sequence = derivatives
        .iter()
        .flat_map(|d| [(d.x, Side::Left, d.left), (d.x, Side::Right, d.right)]);
    let mut witness = None;
    let mut prev: Option<(f64, Side, f64)> = None;
    for entry in sequence {
        if let Some(before) = prev {
            if entry.2 < before.2 - DERIVATIVE_TOL {
                witness = Some(MonotoneViolation {
                    earlier: before,
                    later: entry,
                });
                break;
            }
        }
        prev = Some(entry);
    }
    Ok(MonotoneVerdict {
        monotone: witness.is_none(),
        witness,
        derivatives,
    })
}
