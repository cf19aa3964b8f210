//! The extremal power family `g(t) = θ t^{-1+1/ε}` on `(0, κ₀]`.
//!
//! These are the functions that turn the base inequality into an equality:
//! their running average is pointwise proportional to the function itself,
//! `(1/t) ∫_0^t g = ε g(t)`, and their shape pair is exactly
//! `(h_poly(p, ε), h_poly(q, ε))`.

use super::{MomentData, StepFunction};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::{omega, omega_sup, Exponents};

/// Fraction of the domain below the first breakpoint when discretizing.
const FIRST_CELL_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExtremal {
    theta: f64,
    eps: f64,
    kappa0: f64,
}

impl PowerExtremal {
    pub fn new(exp: &Exponents, theta: f64, eps: f64, kappa0: f64) -> Result<Self> {
        let sup = omega_sup(exp.p());
        if !eps.is_finite() || eps <= 1.0 || eps >= sup {
            return Err(Error::OutOfDomain {
                name: "eps",
                value: eps,
                min: 1.0,
                max: sup,
            });
        }
        if !(theta > 0.0) {
            return Err(Error::OutOfDomain {
                name: "theta",
                value: theta,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if !(kappa0 > 0.0 && kappa0 <= 1.0) {
            return Err(Error::OutOfDomain {
                name: "kappa0",
                value: kappa0,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self { theta, eps, kappa0 })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    /// `g(t) = θ t^{-1+1/ε}`.
    pub fn value(&self, t: f64) -> f64 {
        self.theta * t.powf(-1.0 + 1.0 / self.eps)
    }

    /// `∫_0^t g = θ ε t^{1/ε}`.
    pub fn prefix_integral(&self, t: f64) -> f64 {
        self.theta * self.eps * t.powf(1.0 / self.eps)
    }

    /// The running average `(1/t) ∫_0^t g`, evaluated from the prefix
    /// integral (not through the proportionality identity).
    pub fn average(&self, t: f64) -> f64 {
        self.prefix_integral(t) / t
    }

    /// `∫_0^κ g^r` in closed form; finite for every `r` with
    /// `1 + r(1/ε - 1) > 0`, which the constructor guarantees up to `r = p`.
    pub fn moment(&self, r: f64) -> f64 {
        let a = 1.0 + r * (1.0 / self.eps - 1.0);
        debug_assert!(a > 0.0, "divergent moment exponent {a}");
        self.theta.powf(r) * self.kappa0.powf(a) / a
    }

    pub fn moments(&self, exp: &Exponents) -> Result<MomentData> {
        MomentData::new(
            exp,
            self.kappa0,
            self.moment(1.0),
            self.moment(exp.q()),
            self.moment(exp.p()),
        )
    }

    /// `∫_0^κ A(t)^r dt` in closed form: the average is `ε g`, so the value
    /// is `ε^r` times the plain moment.
    pub fn hardy_integral(&self, r: f64) -> f64 {
        self.eps.powf(r) * self.moment(r)
    }

    /// The same integral by numeric quadrature of the running average,
    /// independent of the proportionality shortcut. The integrable
    /// singularity at 0 is handled by dyadic pieces shrinking towards the
    /// endpoint; piece sums decay geometrically, and integration stops once
    /// the measured decay ratio bounds the remaining tail below tolerance.
    pub fn hardy_integral_quad(&self, r: f64, quad_tol: f64) -> Result<f64> {
        const MAX_PIECES: usize = 4096;
        let f = |t: f64| self.average(t).powf(r);
        let mut total = 0.0;
        let mut hi = self.kappa0;
        let mut prev_piece = f64::INFINITY;
        for k in 0..MAX_PIECES {
            let lo = 0.5 * hi;
            let piece = quad::adaptive(&f, lo, hi, quad_tol, "hardy average of the power family")?;
            total += piece;
            if k > 0 && piece > 0.0 && piece < prev_piece {
                let ratio = piece / prev_piece;
                let tail_bound = piece * ratio / (1.0 - ratio);
                if tail_bound < quad_tol * total {
                    return Ok(total);
                }
            }
            prev_piece = piece;
            hi = lo;
        }
        Err(Error::QuadratureFailed {
            what: "hardy average of the power family",
            achieved: prev_piece / total.max(1e-300),
            requested: quad_tol,
        })
    }

    /// Cell-average discretization on geometric breakpoints
    /// `b_i = κ ρ^{n-i}` with `ρ` fixed by `b_1 = 10^{-6} κ`. Cell averages
    /// (not samples) keep all three moments converging in `n`.
    pub fn discretize(&self, n: usize) -> Result<StepFunction> {
        if n == 0 {
            return Err(Error::OutOfDomain {
                name: "n",
                value: 0.0,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        if n == 1 {
            return StepFunction::constant(self.kappa0, self.moment(1.0) / self.kappa0);
        }
        let rho = FIRST_CELL_FRACTION.powf(1.0 / (n - 1) as f64);
        let mut edges = Vec::with_capacity(n + 1);
        edges.push(0.0);
        for i in 1..n {
            edges.push(self.kappa0 * rho.powi((n - i) as i32));
        }
        edges.push(self.kappa0);
        let mut values = Vec::with_capacity(n);
        for w in edges.windows(2) {
            let mass = self.prefix_integral(w[1]) - self.prefix_integral(w[0]);
            values.push(mass / (w[1] - w[0]));
        }
        StepFunction::new(self.kappa0, edges[1..n].to_vec(), values)
    }
}

/// Build the extremal with prescribed exponent parameter and first moment:
/// `θ = f / (κ₀^{1/ε} ε)`.
pub fn extremal_from_eps(exp: &Exponents, eps: f64, kappa0: f64, f: f64) -> Result<PowerExtremal> {
    if !(f > 0.0) {
        return Err(Error::OutOfDomain {
            name: "f",
            value: f,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if !(kappa0 > 0.0 && kappa0 <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "kappa0",
            value: kappa0,
            min: 0.0,
            max: 1.0,
        });
    }
    let theta = f / (kappa0.powf(1.0 / eps) * eps);
    PowerExtremal::new(exp, theta, eps, kappa0)
}

/// Solve the compatibility equation for a moment triple `(f, A, F)`: find
/// `κ₀ ∈ (0, 1]` where the two inverse evaluations agree,
/// `omega(q, f^q/(κ^{q-1} A)) = omega(p, f^p/(κ^{p-1} F))`, and return it
/// with the common value `ε₀`.
///
/// The admissible κ range is capped below by the requirement that both
/// arguments stay at most 1; a sign scan over that range locates the root.
/// No sign change means the triple is not extremal-compatible.
pub fn solve_kappa0(
    exp: &Exponents,
    f: f64,
    a_moment: f64,
    f_moment: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    for (name, v) in [("f", f), ("A", a_moment), ("F", f_moment)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Infeasible(format!("moment {name} = {v} not positive")));
        }
    }
    let p = exp.p();
    let q = exp.q();
    let arg_q = |kappa: f64| f.powf(q) / (kappa.powf(q - 1.0) * a_moment);
    let arg_p = |kappa: f64| f.powf(p) / (kappa.powf(p - 1.0) * f_moment);
    let lo_q = arg_q(1.0).powf(1.0 / (q - 1.0));
    let lo_p = arg_p(1.0).powf(1.0 / (p - 1.0));
    let lo = lo_q.max(lo_p);
    if !(lo <= 1.0 + 1e-12) {
        return Err(Error::Infeasible(format!(
            "moment triple admits no kappa0 in (0, 1] (arguments exceed 1 down to kappa = {lo})"
        )));
    }
    let lo = lo.min(1.0);
    let gap = |kappa: f64| -> Result<f64> {
        let wq = omega(q, arg_q(kappa).min(1.0), tol)?;
        let wp = omega(p, arg_p(kappa).min(1.0), tol)?;
        Ok(wq - wp)
    };
    let finish = |kappa: f64| -> Result<(f64, f64)> {
        let eps0 = omega(p, arg_p(kappa).min(1.0), tol)?;
        if eps0 <= 1.0 + 1e-9 {
            return Err(Error::Degenerate(
                "compatibility holds only at the constant-function point (eps0 = 1)".into(),
            ));
        }
        Ok((kappa, eps0))
    };
    let scan = 64usize;
    let mut prev_k = lo;
    let mut prev_d = gap(lo)?;
    if prev_d.abs() <= tol {
        return finish(lo);
    }
    for i in 1..=scan {
        let k = lo + (1.0 - lo) * i as f64 / scan as f64;
        let d = gap(k)?;
        if d.abs() <= tol {
            return finish(k);
        }
        if d.signum() != prev_d.signum() {
            // bisect inside [prev_k, k]
            let (mut a, mut b, mut da) = (prev_k, k, prev_d);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let dm = gap(m)?;
                if dm.abs() <= tol || b - a < 1e-16 {
                    return finish(m);
                }
                if dm.signum() == da.signum() {
                    a = m;
                    da = dm;
                } else {
                    b = m;
                }
            }
            return finish(0.5 * (a + b));
        }
        prev_k = k;
        prev_d = d;
    }
    Err(Error::Infeasible(
        "moment triple is not extremal-compatible: no sign change of the compatibility gap on (0, 1]"
            .into(),
    ))
}
