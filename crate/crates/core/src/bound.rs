//! The sharp constant for the three-moment Hardy bound.
//!
//! For a feasible shape pair the bound is the minimum over
//! `β ∈ [0, 1/(p-1)]` of the root `t(β)` of a one-parameter family of
//! monotone scalar equations. [`sharp_constant`] takes the fast route: solve
//! the zero-order equation for `t(0)`, classify by the sign of the case
//! curve there, and when the sign is positive locate the curve's root below
//! `t(0)`. [`beta_grid_min`] minimizes the family directly and serves as an
//! independent cross-check of the whole construction.

use crate::error::{Error, Result};
use crate::par;
use crate::roots;
use crate::special::{a_beta, alpha_s2, big_g, f_curve, omega, tau, Exponents, ShapePair};

/// Which branch produced the sharp constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// The case curve is positive at `t(0)`; the constant is its interior root.
    InteriorRoot,
    /// The case curve is nonpositive at `t(0)`; the constant is `t(0)` itself.
    BoundaryAtZero,
    /// Constant-function boundary of the shape region; the bound is 1 by
    /// convention and none of the machinery runs.
    ConstantBoundary,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::InteriorRoot => "InteriorRoot",
            CaseTag::BoundaryAtZero => "BoundaryAtZero",
            CaseTag::ConstantBoundary => "ConstantBoundary",
        }
    }
}

/// The computed sharp constant plus classification diagnostics.
#[derive(Debug, Clone)]
pub struct BoundResult {
    /// The sharp constant itself.
    pub t_sharp: f64,
    /// Root of the zero-order equation; upper end of the admissible range.
    pub t_zero: f64,
    pub case_tag: CaseTag,
    /// Sign diagnostic: the case curve evaluated at `t_zero`.
    pub f_at_t_zero: f64,
    /// The one-moment ceiling `omega(p, s1)`; `t_sharp` never exceeds it.
    pub omega_p_s1: f64,
    /// Interior minimizer recovered from the root when the case is interior.
    pub beta_star: Option<f64>,
}

/// `h_β(y) = y^{p-q} - A_β y^p`, strictly decreasing on `[1, ∞)`.
fn h_beta(exp: &Exponents, a: f64, y: f64) -> f64 {
    y.powf(exp.p() - exp.q()) - a * y.powf(exp.p())
}

fn h_beta_deriv(exp: &Exponents, a: f64, y: f64) -> f64 {
    (exp.p() - exp.q()) * y.powf(exp.p() - exp.q() - 1.0) - a * exp.p() * y.powf(exp.p() - 1.0)
}

/// First-approach bound `t1(β)`: the unique `y >= 1` with
/// `y^{p-q} - A_β y^p = (q/p) s1 / (β+1)^{q-1}`.
///
/// Minimized exactly at `β = omega(p, s1) - 1`, where it equals
/// `omega(p, s1)`.
pub fn t1_of_beta(exp: &Exponents, s1: f64, beta: f64, tol: f64) -> Result<f64> {
    if !s1.is_finite() || s1 <= 0.0 || s1 > 1.0 {
        return Err(Error::OutOfDomain {
            name: "s1",
            value: s1,
            min: 0.0,
            max: 1.0,
        });
    }
    let a = a_beta(exp, beta)?;
    let level = exp.q() / exp.p() * s1 / (beta + 1.0).powf(exp.q() - 1.0);
    let at_one = 1.0 - a;
    if level > at_one + tol {
        return Err(Error::Infeasible(format!(
            "no root >= 1: level {level} exceeds h_beta(1) = {at_one}"
        )));
    }
    let f = |y: f64| h_beta(exp, a, y);
    let df = |y: f64| h_beta_deriv(exp, a, y);
    let hi = roots::expand_below(&f, level, "t1_of_beta bracket")?;
    roots::solve_decreasing(&f, Some(&df), 1.0, hi, level, tol, "t1_of_beta")
}

/// Slack of the first-approach comparison inequality at `omega(p, s1)`:
/// nonnegative for every `β` in `(0, 1/(p-1))` and zero only at
/// `β = omega(p, s1) - 1`.
pub fn ceiling_gap(exp: &Exponents, s1: f64, beta: f64, tol: f64) -> Result<f64> {
    let w = omega(exp.p(), s1, tol)?;
    let g = big_g(exp, beta)?;
    let rhs = w.powf(exp.p() - exp.q())
        - g / (exp.p() * (beta + 1.0).powf(exp.q())) * w.powf(exp.p());
    let lhs = exp.q() / exp.p() * s1 / (beta + 1.0).powf(exp.q() - 1.0);
    Ok(rhs - lhs)
}

/// The inhomogeneous term of the β-family equation.
fn t_source(exp: &Exponents, shape: &ShapePair, beta: f64, omega_q_s2: f64) -> Result<f64> {
    let g = big_g(exp, beta)?;
    let p = exp.p();
    let q = exp.q();
    let b1 = beta + 1.0;
    Ok((p - q) / g * b1 * shape.s1()
        + shape.ratio() * (p * (q - 1.0) * beta / g * omega_q_s2.powf(q) - p * b1.powf(q) / g))
}

/// The β-family bound `t(β)`: unique `t >= 1` with
/// `t^p - (p(β+1)^q / G) t^{p-q}` equal to the shape-dependent source term.
/// Delegates to [`t_zero`] at `β = 0`.
pub fn t_of_beta(exp: &Exponents, shape: &ShapePair, beta: f64, tol: f64) -> Result<f64> {
    if beta == 0.0 {
        return t_zero(exp, shape, tol);
    }
    let a = a_beta(exp, beta)?;
    let w = omega(exp.q(), shape.s2(), tol)?;
    let source = t_source(exp, shape, beta, w)?;
    // rewrite through the decreasing map: h_beta(t) = -A_beta * source
    let target = -a * source;
    let at_one = 1.0 - a;
    if at_one < target - 1e-9 {
        return Err(Error::Infeasible(format!(
            "no root >= 1 for beta = {beta}: h_beta(1) = {at_one} below target {target} \
             (s1 = {}, s2 = {})",
            shape.s1(),
            shape.s2()
        )));
    }
    if at_one <= target {
        return Ok(1.0);
    }
    let f = |y: f64| h_beta(exp, a, y);
    let df = |y: f64| h_beta_deriv(exp, a, y);
    let hi = roots::expand_below(&f, target, "t_of_beta bracket")?;
    roots::solve_decreasing(&f, Some(&df), 1.0, hi, target, tol, "t_of_beta")
}

/// The zero-order root `t(0)`: unique `y >= 1` with
/// `y^p - (p/(p-q)) y^{p-q} = s1 - (p/(p-q)) s1/s2`. On the
/// constant-function boundary it is 1 by convention.
pub fn t_zero(exp: &Exponents, shape: &ShapePair, tol: f64) -> Result<f64> {
    if shape.is_boundary(exp) {
        return Ok(1.0);
    }
    let p = exp.p();
    let q = exp.q();
    let c = p / (p - q);
    let rhs = shape.s1() - c * shape.ratio();
    let at_one = 1.0 - c; // equals -q/(p-q)
    if rhs <= at_one + 1e-15 {
        if rhs > at_one - 1e-12 {
            return Ok(1.0);
        }
        return Err(Error::Infeasible(format!(
            "zero-order source {rhs} at or below the feasible floor {at_one}; corrupted shape"
        )));
    }
    let g = |y: f64| y.powf(p) - c * y.powf(p - q);
    let dg = |y: f64| p * y.powf(p - 1.0) - c * (p - q) * y.powf(p - q - 1.0);
    let hi = roots::expand_above(&g, rhs, "t_zero bracket")?;
    roots::solve_increasing(&g, Some(&dg), 1.0, hi, rhs, tol, "t_zero")
}

/// Case curve evaluated at the zero-order root, where the inner inverse
/// collapses and the coefficient reduces to `q`.
fn f_at_zero_order(exp: &Exponents, shape: &ShapePair, t0: f64, tol: f64) -> Result<f64> {
    let alpha = alpha_s2(exp, shape.s2(), tol)?;
    Ok(exp.q() * (t0.powf(exp.p() - exp.q()) - shape.ratio())
        - (exp.p() - exp.q()) * shape.s1() * alpha)
}

/// Compute the sharp constant for a feasible shape pair.
///
/// Classifies by the sign of the case curve at `t(0)`: nonpositive means the
/// minimum of the β-family sits at the `β = 0` boundary and the constant is
/// `t(0)`; positive means an interior minimizer exists and the constant is
/// the curve's unique root in `[1, t(0)]`, from which the minimizer itself
/// is recovered. The result is checked against the one-moment ceiling.
pub fn sharp_constant(exp: &Exponents, shape: &ShapePair, tol: f64) -> Result<BoundResult> {
    let omega_p_s1 = omega(exp.p(), shape.s1(), tol)?;
    if shape.is_boundary(exp) {
        return Ok(BoundResult {
            t_sharp: 1.0,
            t_zero: 1.0,
            case_tag: CaseTag::ConstantBoundary,
            f_at_t_zero: 0.0,
            omega_p_s1,
            beta_star: None,
        });
    }
    let t0 = t_zero(exp, shape, tol)?;
    let f0 = f_at_zero_order(exp, shape, t0, tol)?;
    let (t_sharp, case_tag, beta_star) = if f0 <= tol {
        (t0, CaseTag::BoundaryAtZero, None)
    } else {
        let f1 = f_curve(exp, shape, 1.0, tol)?;
        if f1 > 0.0 {
            return Err(Error::Inconsistent {
                what: "case curve has no sign change in [1, t(0)]",
                at_lo: f1,
                at_hi: f0,
            });
        }
        // the curve is strictly increasing on [1, t(0)]; bisect its root
        let mut lo = 1.0;
        let mut hi = t0;
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..roots::ITER_CAP {
            mid = 0.5 * (lo + hi);
            let fm = f_curve(exp, shape, mid, tol)?;
            if fm.abs() <= tol || hi - lo <= 1e-15 * t0 {
                break;
            }
            if fm > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let tau_root = tau(exp, shape, mid)?.clamp(0.0, 1.0);
        let beta_star = omega(exp.q(), tau_root, tol)? - 1.0;
        (mid, CaseTag::InteriorRoot, Some(beta_star))
    };
    if t_sharp > omega_p_s1 + 10.0 * tol.max(1e-12) {
        return Err(Error::Inconsistent {
            what: "sharp constant exceeds the omega_p(s1) ceiling",
            at_lo: t_sharp,
            at_hi: omega_p_s1,
        });
    }
    Ok(BoundResult {
        t_sharp,
        t_zero: t0,
        case_tag,
        f_at_t_zero: f0,
        omega_p_s1,
        beta_star,
    })
}

/// Direct minimization of the β-family over a uniform grid, refined by
/// golden section around the grid minimum. Grid points evaluate in parallel;
/// the reduction scans in index order, so ties break towards smaller β and
/// the result does not depend on thread count. This is the independent
/// oracle for [`sharp_constant`].
pub fn beta_grid_min(
    exp: &Exponents,
    shape: &ShapePair,
    n_grid: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if n_grid < 3 {
        return Err(Error::OutOfDomain {
            name: "n_grid",
            value: n_grid as f64,
            min: 3.0,
            max: f64::INFINITY,
        });
    }
    let hi = exp.beta_max();
    let step = hi / (n_grid - 1) as f64;
    let values = par::map_indexed(n_grid, |i| {
        let beta = if i + 1 == n_grid { hi } else { i as f64 * step };
        t_of_beta(exp, shape, beta, tol).map(|t| (beta, t))
    });
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    let mut grid = Vec::with_capacity(n_grid);
    for (i, v) in values.into_iter().enumerate() {
        let (beta, t) = v?;
        if t < best {
            best = t;
            best_i = i;
        }
        grid.push((beta, t));
    }
    let lo_edge = if best_i == 0 { 0.0 } else { grid[best_i - 1].0 };
    let hi_edge = if best_i + 1 == n_grid {
        hi
    } else {
        grid[best_i + 1].0
    };
    let f = |beta: f64| t_of_beta(exp, shape, beta, tol);
    let (beta_ref, t_ref) = roots::golden_min(&f, lo_edge, hi_edge, tol.max(1e-13))?;
    if t_ref < best {
        Ok((beta_ref, t_ref))
    } else {
        Ok((grid[best_i].0, best))
    }
}

/// The two-variable extremal value `F * omega(p, f^p/F)^p` for an average
/// `f` and a p-th moment `F` on a probability space.
pub fn bellman_two_var(p: f64, f: f64, big_f: f64, tol: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if !(f > 0.0) {
        return Err(Error::OutOfDomain {
            name: "f",
            value: f,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let ratio = f.powf(p) / big_f;
    if ratio > 1.0 + 1e-12 {
        return Err(Error::OutOfDomain {
            name: "f^p/F",
            value: ratio,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(big_f * omega(p, ratio.min(1.0), tol)?.powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{h_poly, DEFAULT_ROOT_TOL as TOL};

    fn exp2_15() -> Exponents {
        Exponents::new(2.0, 1.5).unwrap()
    }

    fn shape_05_09() -> ShapePair {
        ShapePair::new(&exp2_15(), 0.5, 0.9).unwrap()
    }

    #[test]
    fn t1_at_the_special_parameter() {
        let e = exp2_15();
        // beta = omega_p(s1) - 1 maps back to omega_p(s1)
        let s1 = 0.75;
        let beta0 = omega(2.0, s1, TOL).unwrap() - 1.0;
        assert!((beta0 - 0.5).abs() < 1e-12);
        let t1 = t1_of_beta(&e, s1, beta0, TOL).unwrap();
        assert!((t1 - 1.5).abs() < 1e-10);
    }

    #[test]
    fn t1_exceeds_the_ceiling_elsewhere() {
        let e = exp2_15();
        let s1 = 0.75;
        let w = omega(2.0, s1, TOL).unwrap();
        for &beta in &[0.1, 0.25, 0.4, 0.6, 0.75, 0.9] {
            let t1 = t1_of_beta(&e, s1, beta, TOL).unwrap();
            assert!(t1 > w, "beta = {beta}: t1 = {t1} not above {w}");
        }
    }

    #[test]
    fn ceiling_gap_vanishes_only_at_the_minimizer() {
        let e = exp2_15();
        let s1 = 0.75;
        let beta0 = omega(2.0, s1, TOL).unwrap() - 1.0;
        assert!(ceiling_gap(&e, s1, beta0, TOL).unwrap().abs() < 1e-12);
        assert!(ceiling_gap(&e, s1, 0.25, TOL).unwrap() > 1e-4);
        assert!(ceiling_gap(&e, s1, 0.75, TOL).unwrap() > 1e-4);
    }

    #[test]
    fn t_zero_against_bisection_oracle() {
        let e = exp2_15();
        let shape = shape_05_09();
        // oracle: plain bisection of the increasing map on [1, 4]
        let rhs = 0.5 - 4.0 * (0.5 / 0.9);
        let g = |y: f64| y * y - 4.0 * y.sqrt();
        let (mut lo, mut hi) = (1.0, 4.0);
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if g(m) < rhs {
                lo = m;
            } else {
                hi = m;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let t0 = t_zero(&e, &shape, TOL).unwrap();
        assert!((t0 - oracle).abs() < 1e-10, "t0 = {t0}, oracle = {oracle}");
        assert!((t0 - 1.97).abs() < 0.01);
    }

    #[test]
    fn t_zero_boundary_convention() {
        let e = exp2_15();
        let b = ShapePair::new(&e, 1.0, 1.0).unwrap();
        assert_eq!(t_zero(&e, &b, TOL).unwrap(), 1.0);
    }

    #[test]
    fn t_of_beta_scan_oracle() {
        let e = exp2_15();
        let shape = shape_05_09();
        let beta = 0.5;
        let t = t_of_beta(&e, &shape, beta, TOL).unwrap();
        // independent fine-grid scan of the decreasing map over [1, 4]
        let a = a_beta(&e, beta).unwrap();
        let w = omega(1.5, 0.9, TOL).unwrap();
        let source = t_source(&e, &shape, beta, w).unwrap();
        let target = -a * source;
        let f = |y: f64| h_beta(&e, a, y);
        let mut bracket = None;
        let n = 40_000;
        for i in 0..n {
            let y0 = 1.0 + 3.0 * i as f64 / n as f64;
            let y1 = 1.0 + 3.0 * (i + 1) as f64 / n as f64;
            if (f(y0) - target) >= 0.0 && (f(y1) - target) < 0.0 {
                bracket = Some((y0, y1));
                break;
            }
        }
        let (lo, hi) = bracket.expect("scan found no sign change");
        assert!(t >= lo - 1e-9 && t <= hi + 1e-9, "t = {t} outside [{lo}, {hi}]");
        let ceiling = omega(2.0, 0.5, TOL).unwrap() + 0.2;
        assert!(t >= 1.0 && t <= ceiling);
        // residual of the defining equation at the returned root
        assert!((f(t) - target).abs() < TOL);
    }

    #[test]
    fn t_of_beta_delegates_at_zero() {
        let e = exp2_15();
        let shape = shape_05_09();
        let a = t_of_beta(&e, &shape, 0.0, TOL).unwrap();
        let b = t_zero(&e, &shape, TOL).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sharp_constant_interior_case() {
        let e = exp2_15();
        let shape = shape_05_09();
        let r = sharp_constant(&e, &shape, TOL).unwrap();
        assert_eq!(r.case_tag, CaseTag::InteriorRoot);
        assert!(r.f_at_t_zero > 0.0);
        assert!(r.t_sharp < r.t_zero);
        assert!(r.t_sharp >= 1.0);
        assert!(r.t_sharp <= r.omega_p_s1 + 1e-10);
        let beta_star = r.beta_star.unwrap();
        assert!(beta_star > 0.0 && beta_star < e.beta_max());
        // the curve really vanishes at the returned constant
        let f = f_curve(&e, &shape, r.t_sharp, TOL).unwrap();
        assert!(f.abs() < 10.0 * TOL, "residual {f:e}");
    }

    #[test]
    fn sharp_constant_extremal_sandwich() {
        let e = exp2_15();
        let s1 = h_poly(2.0, 1.2).unwrap();
        let s2 = h_poly(1.5, 1.2).unwrap();
        let shape = ShapePair::new(&e, s1, s2).unwrap();
        let r = sharp_constant(&e, &shape, TOL).unwrap();
        assert!((r.t_sharp - 1.2).abs() < 1e-6, "t_sharp = {}", r.t_sharp);
        assert!((r.omega_p_s1 - 1.2).abs() < 1e-10);
    }

    #[test]
    fn f_curve_collapses_at_the_zero_order_root() {
        let e = exp2_15();
        let shape = shape_05_09();
        let t0 = t_zero(&e, &shape, TOL).unwrap();
        let f = f_curve(&e, &shape, t0, TOL).unwrap();
        // at t(0) the inner inverse evaluates at 1 and the coefficient is q
        let alpha = alpha_s2(&e, 0.9, TOL).unwrap();
        let collapsed = 1.5 * (t0.sqrt() - 0.5 / 0.9) - 0.5 * 0.5 * alpha;
        assert!((f - collapsed).abs() < 1e-9, "{f} vs {collapsed}");
        assert!(f > 0.0);
    }

    #[test]
    fn extremal_shape_dominates_eps_for_every_beta() {
        let e = exp2_15();
        let eps = 1.2;
        let s1 = h_poly(2.0, eps).unwrap();
        let s2 = h_poly(1.5, eps).unwrap();
        let shape = ShapePair::new(&e, s1, s2).unwrap();
        for i in 0..=10 {
            let beta = e.beta_max() * i as f64 / 10.0;
            let t = t_of_beta(&e, &shape, beta, TOL).unwrap();
            assert!(t >= eps - 1e-9, "t({beta}) = {t} below eps");
        }
        // the curve vanishes at the sharp constant for the equality family
        let f = f_curve(&e, &shape, eps, TOL).unwrap();
        assert!(f.abs() < 1e-9, "curve at eps: {f}");
    }

    #[test]
    fn grid_oracle_agrees() {
        let e = exp2_15();
        let shape = shape_05_09();
        let r = sharp_constant(&e, &shape, TOL).unwrap();
        let (_, t_min) = beta_grid_min(&e, &shape, 1000, TOL).unwrap();
        assert!(
            (t_min - r.t_sharp).abs() < 1e-5,
            "grid {t_min} vs root {}",
            r.t_sharp
        );
    }

    #[test]
    fn grid_min_near_constant_boundary() {
        let e = exp2_15();
        // shapes of nearly constant functions approach (1, 1); the bound
        // degrades to 1 there
        let s1 = 0.999f64;
        let s2 = 0.99955f64;
        let shape = ShapePair::new(&e, s1, s2).unwrap();
        assert!(!shape.is_boundary(&e));
        let (_, t_min) = beta_grid_min(&e, &shape, 200, TOL).unwrap();
        assert!(t_min < 1.05, "t_min = {t_min}");
    }

    #[test]
    fn bellman_values() {
        assert!((bellman_two_var(2.0, 1.0, 1.0, TOL).unwrap() - 1.0).abs() < 1e-12);
        let v = bellman_two_var(2.0, 1.0, 4.0 / 3.0, TOL).unwrap();
        assert!((v - 3.0).abs() < 1e-10);
        // large-moment asymptote: value/F approaches (p/(p-1))^p = 4
        let big = 1e8;
        let v = bellman_two_var(2.0, 1.0, big, TOL).unwrap();
        assert!((v / big - 4.0).abs() < 1e-3);
        assert!(bellman_two_var(2.0, 2.0, 1.0, TOL).is_err());
    }
}
