//! Concrete non-increasing functions on `(0, κ]`: their moments, Hardy
//! averages, the extremal power family, and verification of the bound
//! machinery against them.

mod power;
mod search;
mod step;
mod verify;

pub use power::{extremal_from_eps, solve_kappa0, PowerExtremal};
pub use search::{sharpness_search, SearchResult};
pub use step::StepFunction;
pub use verify::{
    verify_main_bound, verify_omega_q_bound, verify_base_inequality, HardyData, MainBoundReport,
    OmegaQReport, SlackReport,
};

use crate::error::{Error, Result};
use crate::special::{Exponents, ShapePair, REL_SLACK};

/// The moment triple of a function on `(0, κ]`: `x = ∫h`, `y = ∫h^q`,
/// `z = ∫h^p`, together with the domain length.
///
/// Hölder's inequality forces
/// `x^q/κ^{q-1} <= y <= x^{(p-q)/(p-1)} z^{(q-1)/(p-1)}` and
/// `x^p/κ^{p-1} <= z`, with equality throughout exactly for constants.
/// Violations inside a 1e-12 relative slack are clamped to the boundary and
/// flagged; anything worse is rejected naming the failed inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentData {
    kappa: f64,
    x: f64,
    y: f64,
    z: f64,
    clamped: bool,
}

impl MomentData {
    pub fn new(exp: &Exponents, kappa: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::OutOfDomain {
                name: "kappa",
                value: kappa,
                min: 0.0,
                max: 1.0,
            });
        }
        for (name, v) in [("x", x), ("y", y), ("z", z)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Infeasible(format!("moment {name} = {v} not positive")));
            }
        }
        let p = exp.p();
        let q = exp.q();
        let mut clamped = false;

        let z_floor = x.powf(p) / kappa.powf(p - 1.0);
        let mut z = z;
        if z < z_floor {
            if z < z_floor * (1.0 - REL_SLACK) {
                return Err(Error::Infeasible(format!(
                    "x^p/kappa^(p-1) <= z violated ({z_floor} > {z})"
                )));
            }
            z = z_floor;
            clamped = true;
        }

        let y_floor = x.powf(q) / kappa.powf(q - 1.0);
        let y_ceil = x.powf((p - q) / (p - 1.0)) * z.powf((q - 1.0) / (p - 1.0));
        let mut y = y;
        if y < y_floor {
            if y < y_floor * (1.0 - REL_SLACK) {
                return Err(Error::Infeasible(format!(
                    "x^q/kappa^(q-1) <= y violated ({y_floor} > {y})"
                )));
            }
            y = y_floor;
            clamped = true;
        }
        if y > y_ceil {
            if y > y_ceil * (1.0 + REL_SLACK) {
                return Err(Error::Infeasible(format!(
                    "y <= x^((p-q)/(p-1)) z^((q-1)/(p-1)) violated ({y} > {y_ceil})"
                )));
            }
            y = y_ceil;
            clamped = true;
        }

        Ok(Self {
            kappa,
            x,
            y,
            z,
            clamped,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// True when a Hölder invariant was rounded onto its boundary.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    /// The normalized shape pair `(x^p/(κ^{p-1} z), x^q/(κ^{q-1} y))`.
    /// Boundary values are allowed here and flagged on the pair itself.
    pub fn shape_params(&self, exp: &Exponents) -> Result<ShapePair> {
        let s1 = self.x.powf(exp.p()) / (self.kappa.powf(exp.p() - 1.0) * self.z);
        let s2 = self.x.powf(exp.q()) / (self.kappa.powf(exp.q() - 1.0) * self.y);
        ShapePair::new(exp, s1, s2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_moments_sit_on_every_boundary() {
        let e = Exponents::new(2.0, 1.5).unwrap();
        let c: f64 = 2.0;
        let kappa = 0.7;
        let m = MomentData::new(
            &e,
            kappa,
            c * kappa,
            c.powf(1.5) * kappa,
            c * c * kappa,
        )
        .unwrap();
        let s = m.shape_params(&e).unwrap();
        assert!((s.s1() - 1.0).abs() < 1e-12);
        assert!((s.s2() - 1.0).abs() < 1e-12);
        assert!(s.is_boundary(&e));
    }

    #[test]
    fn violations_are_named() {
        let e = Exponents::new(2.0, 1.5).unwrap();
        let err = MomentData::new(&e, 1.0, 1.0, 0.5, 2.0).unwrap_err();
        assert!(err.to_string().contains("x^q/kappa^(q-1)"));
        let err = MomentData::new(&e, 1.0, 1.0, 1.9, 2.0).unwrap_err();
        assert!(err.to_string().contains("z^((q-1)/(p-1))"));
        let err = MomentData::new(&e, 1.0, 2.0, 3.0, 3.0).unwrap_err();
        assert!(err.to_string().contains("x^p/kappa^(p-1)"));
    }
}
