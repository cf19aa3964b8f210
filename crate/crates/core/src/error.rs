//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scalar argument fell outside the interval a function is defined on.
    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A root search exhausted its iteration budget. Carries the final
    /// bracket and the residual achieved there.
    #[error("{what}: no convergence (bracket [{lo}, {hi}], residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    /// Adaptive quadrature hit its subdivision cap before reaching the
    /// requested tolerance.
    #[error("quadrature of {what} did not converge (achieved {achieved:e}, requested {requested:e})")]
    QuadratureFailed {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    /// Inputs violate a feasibility constraint; the message names it.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Inputs sit on a degenerate boundary where the requested quantity is
    /// not defined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Two quantities the theory forces to agree came out contradictory.
    /// Surfaced loudly instead of guessing.
    #[error("consistency violation: {what} (endpoint values {at_lo:e}, {at_hi:e})")]
    Inconsistent {
        what: &'static str,
        at_lo: f64,
        at_hi: f64,
    },

    /// The randomized search could not produce enough feasible iterates.
    #[error("search failed: {reason} ({accepted}/{attempted} projections accepted)")]
    SearchFailed {
        reason: String,
        accepted: usize,
        attempted: usize,
    },

    /// A serialized step-function record could not be decoded.
    #[error("parse error: {0}")]
    Parse(String),
}
