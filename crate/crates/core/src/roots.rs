//! Bracketed scalar solvers for strictly monotone functions.
//!
//! Everything downstream reduces to inverting a strictly monotone map on a
//! known interval, so a bisection loop with an optional safeguarded Newton
//! step is the single primitive we need.

use crate::error::{Error, Result};

/// Iteration budget for every bracketed search.
pub(crate) const ITER_CAP: usize = 200;

/// Largest bracket endpoint tried when expanding towards +infinity.
const BRACKET_CAP: f64 = 1_048_576.0; // 2^20

/// Solve `f(x) = target` for strictly decreasing `f` on `[lo, hi]`.
///
/// Requires `f(lo) >= target >= f(hi)` up to rounding. Converges on the
/// residual: the returned `x` satisfies `|f(x) - target| <= tol`. When `df`
/// is supplied a Newton step is tried first and falls back to bisection
/// whenever it leaves the bracket.
pub(crate) fn solve_decreasing(
    f: &dyn Fn(f64) -> f64,
    df: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    target: f64,
    tol: f64,
    what: &'static str,
) -> Result<f64> {
    debug_assert!(lo <= hi);
    let mut a = lo;
    let mut b = hi;
    let ga = f(a) - target;
    let gb = f(b) - target;
    if ga.abs() <= tol {
        return Ok(a);
    }
    if gb.abs() <= tol {
        return Ok(b);
    }
    if ga < 0.0 || gb > 0.0 {
        return Err(Error::Inconsistent {
            what,
            at_lo: ga,
            at_hi: gb,
        });
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..ITER_CAP {
        let gx = f(x) - target;
        if gx.abs() <= tol {
            return Ok(x);
        }
        // decreasing: g > 0 means the root lies to the right
        if gx > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let mut next = f64::NAN;
        if let Some(df) = df {
            let d = df(x);
            if d != 0.0 {
                let candidate = x - gx / d;
                if candidate.is_finite() && candidate > a && candidate < b {
                    next = candidate;
                }
            }
        }
        if !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if b - a <= f64::EPSILON * b.abs().max(1.0) {
            // bracket exhausted at machine precision; accept the midpoint
            let mid = 0.5 * (a + b);
            let res = (f(mid) - target).abs();
            if res <= tol * 1e3 {
                return Ok(mid);
            }
            return Err(Error::NoConvergence {
                what,
                lo: a,
                hi: b,
                residual: res,
            });
        }
        x = next;
    }
    Err(Error::NoConvergence {
        what,
        lo: a,
        hi: b,
        residual: (f(x) - target).abs(),
    })
}

/// Solve `f(x) = target` for strictly increasing `f` on `[lo, hi]`.
pub(crate) fn solve_increasing(
    f: &dyn Fn(f64) -> f64,
    df: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    target: f64,
    tol: f64,
    what: &'static str,
) -> Result<f64> {
    let neg = |x: f64| -f(x);
    match df {
        Some(d) => {
            let negd = |x: f64| -d(x);
            solve_decreasing(&neg, Some(&negd), lo, hi, -target, tol, what)
        }
        None => solve_decreasing(&neg, None, lo, hi, -target, tol, what),
    }
}

/// Expand a right bracket endpoint for decreasing `f`: the smallest power of
/// two `B >= 2` with `f(B) <= target`.
pub(crate) fn expand_below(
    f: &dyn Fn(f64) -> f64,
    target: f64,
    what: &'static str,
) -> Result<f64> {
    let mut b = 2.0;
    while b <= BRACKET_CAP {
        if f(b) <= target {
            return Ok(b);
        }
        b *= 2.0;
    }
    Err(Error::Infeasible(format!(
        "{what}: no sign change up to {BRACKET_CAP}"
    )))
}

/// Expand a right bracket endpoint for increasing `f`: the smallest power of
/// two `B >= 2` with `f(B) >= target`.
pub(crate) fn expand_above(
    f: &dyn Fn(f64) -> f64,
    target: f64,
    what: &'static str,
) -> Result<f64> {
    expand_below(&|x| -f(x), -target, what)
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal `f` on `[a, b]`, shrinking the
/// interval to width `tol`. Returns the midpoint of the final interval and
/// the value there. `f` may fail; failures propagate.
pub(crate) fn golden_min(
    f: &dyn Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..ITER_CAP {
        if b - a <= tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}
