//! Scalar special functions behind the sharp bound.
//!
//! The whole construction runs through one polynomial family: for an
//! exponent `r > 1`, `h_poly(r, z) = -(r-1) z^r + r z^{r-1}` decreases from 1
//! to 0 on `[1, r/(r-1)]`, and `omega(r, ·)` is its inverse. Everything else
//! in this module is elementary arithmetic on top of those two.

use crate::error::{Error, Result};
use crate::roots;
use rand::RngExt;

/// Absolute residual tolerance used by default in every root search.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Relative tolerance used by default in every quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Relative slack granted when checking closed-form invariants in floats.
pub(crate) const REL_SLACK: f64 = 1e-12;

/// The exponent pair `1 < q < p` that parameterizes every formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    p: f64,
    q: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() || q <= 1.0 || p <= q {
            return Err(Error::Infeasible(format!(
                "exponents must satisfy 1 < q < p (got p = {p}, q = {q})"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Right endpoint of the admissible parameter range, `1/(p-1)`.
    pub fn beta_max(&self) -> f64 {
        1.0 / (self.p - 1.0)
    }
}

/// Upper endpoint `r/(r-1)` of the range of `omega(r, ·)`.
pub fn omega_sup(r: f64) -> f64 {
    r / (r - 1.0)
}

/// The moment-shape pair `(s1, s2)`, both in `(0, 1]`, with the feasibility
/// constraint `s1^(q-1) <= s2^(p-1)` forced by Hölder's inequality on the
/// underlying moments. The constructor accepts the closed region; points on
/// the constant-function boundary are flagged by [`ShapePair::is_boundary`]
/// and handled by convention in the bound machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapePair {
    s1: f64,
    s2: f64,
}

impl ShapePair {
    pub fn new(exp: &Exponents, s1: f64, s2: f64) -> Result<Self> {
        if !s1.is_finite() || s1 <= 0.0 || s1 > 1.0 + REL_SLACK {
            return Err(Error::Infeasible(format!("s1 = {s1} outside (0, 1]")));
        }
        if !s2.is_finite() || s2 <= 0.0 || s2 > 1.0 + REL_SLACK {
            return Err(Error::Infeasible(format!("s2 = {s2} outside (0, 1]")));
        }
        let s1 = s1.min(1.0);
        let s2 = s2.min(1.0);
        let lhs = s1.powf(exp.q() - 1.0);
        let rhs = s2.powf(exp.p() - 1.0);
        if lhs > rhs * (1.0 + REL_SLACK) {
            return Err(Error::Infeasible(format!(
                "s1^(q-1) <= s2^(p-1) violated (s1 = {s1}, s2 = {s2})"
            )));
        }
        Ok(Self { s1, s2 })
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// `s1/s2`, the ratio entering every denominator of the second approach.
    pub fn ratio(&self) -> f64 {
        self.s1 / self.s2
    }

    /// True on the constant-function boundary, where only constant functions
    /// (with `s1 = s2 = 1`) or no functions at all realize the pair.
    pub fn is_boundary(&self, exp: &Exponents) -> bool {
        if self.s2 >= 1.0 - REL_SLACK {
            return true;
        }
        let lhs = self.s1.powf(exp.q() - 1.0);
        let rhs = self.s2.powf(exp.p() - 1.0);
        lhs >= rhs * (1.0 - REL_SLACK)
    }

    /// Draw a strictly interior feasible pair, away from the numerical
    /// corners. Used by sweeps and the test suites.
    pub fn random(exp: &Exponents, rng: &mut impl rand::Rng) -> Self {
        let s2: f64 = rng.random_range(0.05..0.99);
        let cap = s2.powf((exp.p() - 1.0) / (exp.q() - 1.0));
        let s1 = cap * rng.random_range(0.05..0.98);
        Self { s1, s2 }
    }
}

/// The decreasing polynomial `-(r-1) z^r + r z^{r-1}` on `[1, r/(r-1)]`.
///
/// Takes the value 1 at `z = 1` and 0 at the right endpoint.
pub fn h_poly(r: f64, z: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::OutOfDomain {
            name: "r",
            value: r,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let hi = omega_sup(r);
    if !z.is_finite() || z < 1.0 - REL_SLACK || z > hi * (1.0 + REL_SLACK) {
        return Err(Error::OutOfDomain {
            name: "z",
            value: z,
            min: 1.0,
            max: hi,
        });
    }
    let z = z.clamp(1.0, hi);
    Ok(-(r - 1.0) * z.powf(r) + r * z.powf(r - 1.0))
}

fn h_poly_deriv(r: f64, z: f64) -> f64 {
    // r(r-1) z^{r-2} (1 - z), zero at z = 1
    r * (r - 1.0) * z.powf(r - 2.0) * (1.0 - z)
}

/// Inverse of [`h_poly`] in its second argument: the unique
/// `λ ∈ [1, r/(r-1)]` with `h_poly(r, λ) = s`, found by bracketed bisection
/// with a safeguarded Newton step. Exact at both endpoints.
pub fn omega(r: f64, s: f64, tol: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::OutOfDomain {
            name: "r",
            value: r,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if !s.is_finite() || !(-REL_SLACK..=1.0 + REL_SLACK).contains(&s) {
        return Err(Error::OutOfDomain {
            name: "s",
            value: s,
            min: 0.0,
            max: 1.0,
        });
    }
    if s >= 1.0 {
        return Ok(1.0);
    }
    if s <= 0.0 {
        return Ok(omega_sup(r));
    }
    let f = |z: f64| -(r - 1.0) * z.powf(r) + r * z.powf(r - 1.0);
    let df = |z: f64| h_poly_deriv(r, z);
    roots::solve_decreasing(&f, Some(&df), 1.0, omega_sup(r), s, tol, "omega")
}

/// `G(p, q, β) = q(p-1)(β+1) - p(q-1)`; positive for every `β >= 0` since it
/// equals `p - q` at zero and increases.
pub fn big_g(exp: &Exponents, beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::OutOfDomain {
            name: "beta",
            value: beta,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(exp.q() * (exp.p() - 1.0) * (beta + 1.0) - exp.p() * (exp.q() - 1.0))
}

fn check_beta_range(exp: &Exponents, beta: f64) -> Result<f64> {
    let hi = exp.beta_max();
    if !beta.is_finite() || beta < -REL_SLACK || beta > hi * (1.0 + REL_SLACK) {
        return Err(Error::OutOfDomain {
            name: "beta",
            value: beta,
            min: 0.0,
            max: hi,
        });
    }
    Ok(beta.clamp(0.0, hi))
}

/// `A_β = G / (p (β+1)^q)`; equals `(p-q)/p` at `β = 0` and exceeds it for
/// every `β` in `(0, 1/(p-1)]`, which is what keeps `y ↦ y^{p-q} - A_β y^p`
/// strictly decreasing on `[1, ∞)`.
pub fn a_beta(exp: &Exponents, beta: f64) -> Result<f64> {
    let beta = check_beta_range(exp, beta)?;
    let g = big_g(exp, beta)?;
    Ok(g / (exp.p() * (beta + 1.0).powf(exp.q())))
}

/// `ϑ(β) = (p-1)(β+1)^q - p(β+1)^{q-1}`; increasing from -1 at `β = 0` to 0
/// at `β = 1/(p-1)`.
pub fn theta_beta(exp: &Exponents, beta: f64) -> Result<f64> {
    let beta = check_beta_range(exp, beta)?;
    let b1 = beta + 1.0;
    Ok((exp.p() - 1.0) * b1.powf(exp.q()) - exp.p() * b1.powf(exp.q() - 1.0))
}

/// `α(s2) = omega(q, s2)^q / s2 - 1`; strictly decreasing on `(0, 1]` with
/// `α(1) = 0` exactly.
pub fn alpha_s2(exp: &Exponents, s2: f64, tol: f64) -> Result<f64> {
    if !s2.is_finite() || s2 <= 0.0 || s2 > 1.0 + REL_SLACK {
        return Err(Error::OutOfDomain {
            name: "s2",
            value: s2,
            min: 0.0,
            max: 1.0,
        });
    }
    if s2 >= 1.0 {
        return Ok(0.0);
    }
    let w = omega(exp.q(), s2, tol)?;
    Ok(w.powf(exp.q()) / s2 - 1.0)
}

/// Guard threshold for the `τ` denominator.
const TAU_DENOM_GUARD: f64 = 1e-14;

/// `τ(t) = ((p-q)/p) (t^p - s1) / (t^{p-q} - s1/s2)`, strictly increasing in
/// `t` on `[1, ∞)` for every interior feasible pair.
pub fn tau(exp: &Exponents, shape: &ShapePair, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 1.0 - REL_SLACK {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let t = t.max(1.0);
    let denom = t.powf(exp.p() - exp.q()) - shape.ratio();
    if denom.abs() < TAU_DENOM_GUARD {
        return Err(Error::Degenerate(format!(
            "tau denominator |t^(p-q) - s1/s2| = {:.3e} below guard (constant-function boundary)",
            denom.abs()
        )));
    }
    Ok((exp.p() - exp.q()) / exp.p() * (t.powf(exp.p()) - shape.s1()) / denom)
}

/// The case-splitting curve
/// `F(t) = q (p ω^{q-1} - (p-1) ω^q) (t^{p-q} - s1/s2) - (p-q) s1 α(s2)`
/// with `ω = omega(q, τ(t))`. Defined for `t` with `τ(t) <= 1`, i.e. up to
/// the zero-order root; its sign there picks the boundary or interior case,
/// and its root (when one exists) is the sharp constant.
pub fn f_curve(exp: &Exponents, shape: &ShapePair, t: f64, tol: f64) -> Result<f64> {
    let tau_t = tau(exp, shape, t)?;
    if tau_t > 1.0 + 1e-9 {
        return Err(Error::OutOfDomain {
            name: "tau(t)",
            value: tau_t,
            min: 0.0,
            max: 1.0,
        });
    }
    let tau_t = tau_t.clamp(0.0, 1.0);
    let w = omega(exp.q(), tau_t, tol)?;
    let q = exp.q();
    let p = exp.p();
    let coeff = q * (p * w.powf(q - 1.0) - (p - 1.0) * w.powf(q));
    let alpha = alpha_s2(exp, shape.s2(), tol)?;
    Ok(coeff * (t.powf(p - q) - shape.ratio()) - (p - q) * shape.s1() * alpha)
}
