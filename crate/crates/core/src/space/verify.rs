//! Numerical verification of the inequalities against concrete functions.

use super::StepFunction;
use crate::bound::{sharp_constant, BoundResult};
use crate::error::{Error, Result};
use crate::special::{big_g, omega, Exponents, DEFAULT_QUAD_TOL};

/// Two sides of one inequality; `slack = rhs - lhs` must be nonnegative up
/// to quadrature error.
#[derive(Debug, Clone, Copy)]
pub struct SlackReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl SlackReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
        }
    }
}

/// The three integrals and moments entering the β-family inequality,
/// computed once so a whole grid of β values can be checked cheaply.
#[derive(Debug, Clone)]
pub struct HardyData {
    pub hardy_p: f64,
    pub hardy_q: f64,
    pub mixed: f64,
    pub kappa: f64,
    pub x: f64,
    pub y: f64,
}

impl HardyData {
    pub fn compute(h: &StepFunction, exp: &Exponents, quad_tol: f64) -> Result<Self> {
        let m = h.moments(exp)?;
        Ok(Self {
            hardy_p: h.hardy_integral(exp.p(), quad_tol)?,
            hardy_q: h.hardy_integral(exp.q(), quad_tol)?,
            mixed: h.mixed_integral(exp, quad_tol)?,
            kappa: m.kappa(),
            x: m.x(),
            y: m.y(),
        })
    }

    /// Slack of the four-term inequality at one parameter value `β > 0`.
    pub fn base_slack(&self, exp: &Exponents, beta: f64) -> Result<SlackReport> {
        if !(beta > 0.0) {
            return Err(Error::OutOfDomain {
                name: "beta",
                value: beta,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        let p = exp.p();
        let q = exp.q();
        let g = big_g(exp, beta)?;
        let b1 = beta + 1.0;
        let avg_pq = (self.x / self.kappa).powf(p - q);
        let rhs = p * b1.powf(q) / g * self.mixed
            + (p - q) * b1 / g * self.x.powf(p) / self.kappa.powf(p - 1.0)
            + p * (q - 1.0) * beta / g * avg_pq * self.hardy_q
            - p * b1.powf(q) / g * avg_pq * self.y;
        Ok(SlackReport::new(self.hardy_p, rhs))
    }
}

/// Check the β-family inequality for a single parameter value.
pub fn verify_base_inequality(
    h: &StepFunction,
    exp: &Exponents,
    beta: f64,
    quad_tol: f64,
) -> Result<SlackReport> {
    HardyData::compute(h, exp, quad_tol)?.base_slack(exp, beta)
}

/// Report for the q-exponent comparison chain: the Hardy q-integral against
/// its inverse-function bound, and the β-parameterized majorant against its
/// claimed minimum.
#[derive(Debug, Clone, Copy)]
pub struct OmegaQReport {
    /// `∫ A(t)^q dt`.
    pub hardy_q: f64,
    /// The middle term `y · omega(q, s2)^q`.
    pub middle: f64,
    /// `middle - hardy_q`, nonnegative.
    pub first_slack: f64,
    /// Minimum of the β-majorant over the scan grid (including the exact
    /// minimizer).
    pub rhs_min: f64,
    /// Where the scan attained it.
    pub rhs_min_beta: f64,
    /// `rhs_min - middle`; vanishes because the majorant's minimum is the
    /// middle term.
    pub min_gap: f64,
}

/// Verify the q-exponent chain for a step function.
pub fn verify_omega_q_bound(
    h: &StepFunction,
    exp: &Exponents,
    quad_tol: f64,
) -> Result<OmegaQReport> {
    let q = exp.q();
    let m = h.moments(exp)?;
    let hardy_q = h.hardy_integral(q, quad_tol)?;
    let shape = m.shape_params(exp)?;
    let s2 = shape.s2();
    let w = omega(q, s2, quad_tol.min(1e-12))?;
    let middle = m.y() * w.powf(q);
    if s2 >= 1.0 - 1e-12 {
        // constant function: the chain collapses to equalities
        return Ok(OmegaQReport {
            hardy_q,
            middle,
            first_slack: middle - hardy_q,
            rhs_min: middle,
            rhs_min_beta: 0.0,
            min_gap: 0.0,
        });
    }
    let jensen = m.x().powf(q) / m.kappa().powf(q - 1.0);
    let majorant = |beta: f64| {
        (beta + 1.0) / beta * ((beta + 1.0).powf(q - 1.0) * m.y() - jensen) / (q - 1.0)
    };
    let beta_hat = w - 1.0;
    let mut rhs_min = majorant(beta_hat);
    let mut rhs_min_beta = beta_hat;
    for i in 1..=200 {
        let beta = 3.0 * i as f64 / 200.0;
        let v = majorant(beta);
        if v < rhs_min {
            rhs_min = v;
            rhs_min_beta = beta;
        }
    }
    Ok(OmegaQReport {
        hardy_q,
        middle,
        first_slack: middle - hardy_q,
        rhs_min,
        rhs_min_beta,
        min_gap: rhs_min - middle,
    })
}

/// The headline check: the normalized Hardy ratio against the sharp constant
/// of the function's own shape pair.
#[derive(Debug, Clone)]
pub struct MainBoundReport {
    /// `(∫ A^p / ∫ h^p)^{1/p}`.
    pub ratio: f64,
    pub bound: BoundResult,
    /// `t_sharp - ratio`, nonnegative.
    pub slack: f64,
}

pub fn verify_main_bound(
    h: &StepFunction,
    exp: &Exponents,
    tol: f64,
) -> Result<MainBoundReport> {
    let m = h.moments(exp)?;
    let shape = m.shape_params(exp)?;
    let hardy_p = h.hardy_integral(exp.p(), DEFAULT_QUAD_TOL)?;
    let ratio = (hardy_p / m.z()).powf(1.0 / exp.p());
    let bound = sharp_constant(exp, &shape, tol)?;
    let slack = bound.t_sharp - ratio;
    Ok(MainBoundReport {
        ratio,
        bound,
        slack,
    })
}
