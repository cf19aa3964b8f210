//! Sharp constants for the Hardy averaging operator on non-increasing
//! functions with three prescribed moments.
//!
//! Given exponents `1 < q < p` and a function `h` on `(0, κ]` with known
//! `∫h`, `∫h^q`, `∫h^p`, the normalized shape pair `(s1, s2)` of those
//! moments determines a constant `t(s1, s2)` with
//!
//! ```text
//! ∫_0^κ ((1/t) ∫_0^t h)^p dt  <=  t(s1, s2)^p · ∫_0^κ h^p
//! ```
//!
//! sharp on the power family `θ t^{-1+1/ε}`. The [`bound`] module computes
//! the constant two independent ways, [`special`] houses the scalar
//! functions it is built from, and [`space`] provides concrete step and
//! power functions to verify every inequality numerically.
//!
//! With the default `parallel` feature, grid minimization, bulk
//! verification, and the randomized sharpness search fan out over a rayon
//! pool; disabling the feature swaps in sequential loops with identical
//! results.

// negated float comparisons are deliberate throughout: `!(x > 0.0)` rejects
// NaN where `x <= 0.0` would accept it
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod error;
pub mod space;
pub mod special;

mod par;
mod quad;
mod roots;

pub use bound::{
    bellman_two_var, beta_grid_min, ceiling_gap, sharp_constant, t1_of_beta, t_of_beta, t_zero,
    BoundResult, CaseTag,
};
pub use error::{Error, Result};
pub use par::configure_threads;
pub use space::{
    extremal_from_eps, sharpness_search, solve_kappa0, verify_main_bound, verify_omega_q_bound,
    verify_base_inequality, HardyData, MainBoundReport, MomentData, OmegaQReport, PowerExtremal,
    SearchResult, SlackReport, StepFunction,
};
pub use special::{
    a_beta, alpha_s2, big_g, f_curve, h_poly, omega, omega_sup, tau, theta_beta, Exponents,
    ShapePair, DEFAULT_QUAD_TOL, DEFAULT_ROOT_TOL,
};
