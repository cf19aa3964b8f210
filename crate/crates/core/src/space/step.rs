//! Non-increasing step functions and their Hardy averages.

use super::MomentData;
use crate::error::{Error, Result};
use crate::quad;
use crate::special::{Exponents, REL_SLACK};
use rand::{Rng, RngExt};
use serde::Deserialize;

/// A positive non-increasing step function on `(0, kappa]`: `values[i]` on
/// the i-th subinterval of the partition induced by `breakpoints`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    kappa: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(kappa: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::OutOfDomain {
                name: "kappa",
                value: kappa,
                min: 0.0,
                max: 1.0,
            });
        }
        if values.is_empty() || breakpoints.len() + 1 != values.len() {
            return Err(Error::Parse(format!(
                "{} breakpoints require {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        let mut prev = 0.0;
        for &b in &breakpoints {
            if !(b > prev && b < kappa) {
                return Err(Error::Infeasible(format!(
                    "breakpoints must be strictly increasing inside (0, kappa); got {b}"
                )));
            }
            prev = b;
        }
        let mut values = values;
        for i in 0..values.len() {
            let v = values[i];
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Infeasible(format!("value {v} not positive")));
            }
            if i > 0 && v > values[i - 1] {
                if v > values[i - 1] * (1.0 + REL_SLACK) {
                    return Err(Error::Infeasible(format!(
                        "values must be non-increasing; {} followed by {v}",
                        values[i - 1]
                    )));
                }
                values[i] = values[i - 1];
            }
        }
        Ok(Self {
            kappa,
            breakpoints,
            values,
        })
    }

    pub fn constant(kappa: f64, c: f64) -> Result<Self> {
        Self::new(kappa, Vec::new(), vec![c])
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_steps(&self) -> usize {
        self.values.len()
    }

    /// Subinterval edges including 0 and kappa.
    fn edges(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.values.len() + 1);
        e.push(0.0);
        e.extend_from_slice(&self.breakpoints);
        e.push(self.kappa);
        e
    }

    /// The scaled copy `t ↦ c·h(t)`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.kappa,
            self.breakpoints.clone(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    /// Exact moment triple by summing `v^r · width` per subinterval.
    pub fn moments(&self, exp: &Exponents) -> Result<MomentData> {
        let edges = self.edges();
        let mut x = 0.0;
        let mut y = 0.0;
        let mut z = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let w = edges[i + 1] - edges[i];
            x += v * w;
            y += v.powf(exp.q()) * w;
            z += v.powf(exp.p()) * w;
        }
        MomentData::new(exp, self.kappa, x, y, z)
    }

    /// Per-subinterval representation of the running average
    /// `A(t) = (1/t) ∫_0^t h`: on the i-th piece `A(t) = c_i + d_i/t` with
    /// coefficients from prefix sums. On the first piece `A ≡ v_1`.
    fn average_coeffs(&self) -> Vec<(f64, f64)> {
        let edges = self.edges();
        let mut out = Vec::with_capacity(self.values.len());
        let mut prefix = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            out.push((v, prefix - v * edges[i]));
            prefix += v * (edges[i + 1] - edges[i]);
        }
        out
    }

    /// `∫_0^kappa A(t)^r dt` with `A` the running average, by adaptive
    /// quadrature on each subinterval. Pieces with a vanishing `1/t`
    /// coefficient integrate in closed form.
    pub fn hardy_integral(&self, r: f64, quad_tol: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::OutOfDomain {
                name: "r",
                value: r,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        self.average_power_integral(r, 0.0, quad_tol)
    }

    /// First right-side term of the base inequality:
    /// `∫_0^kappa A(t)^{p-q} h(t)^q dt`.
    pub fn mixed_integral(&self, exp: &Exponents, quad_tol: f64) -> Result<f64> {
        self.average_power_integral(exp.p() - exp.q(), exp.q(), quad_tol)
    }

    /// `∫ A(t)^r h(t)^s dt`; `h` is constant per piece so the factor moves
    /// outside each piece integral.
    fn average_power_integral(&self, r: f64, s: f64, quad_tol: f64) -> Result<f64> {
        let edges = self.edges();
        let coeffs = self.average_coeffs();
        let mut total = 0.0;
        for (i, &(c, d)) in coeffs.iter().enumerate() {
            let (a, b) = (edges[i], edges[i + 1]);
            let hq = self.values[i].powf(s);
            let piece = if d.abs() <= c * 1e-15 {
                c.powf(r) * (b - a)
            } else {
                quad::adaptive(
                    &|t: f64| (c + d / t).powf(r),
                    a,
                    b,
                    quad_tol,
                    "hardy average piece",
                )?
            };
            total += hq * piece;
        }
        Ok(total)
    }

    /// Serialize as the flat record `{kappa, breakpoints, values}` with every
    /// float printed to 17 significant digits.
    pub fn to_json(&self) -> String {
        let fmt = |v: f64| format!("{v:.16e}");
        let list = |vs: &[f64]| {
            vs.iter()
                .map(|&v| fmt(v))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "{{\"kappa\": {}, \"breakpoints\": [{}], \"values\": [{}]}}\n",
            fmt(self.kappa),
            list(&self.breakpoints),
            list(&self.values)
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Record {
            kappa: f64,
            breakpoints: Vec<f64>,
            values: Vec<f64>,
        }
        let rec: Record =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(rec.kappa, rec.breakpoints, rec.values)
    }

    /// Seeded random non-increasing step function: log-values sorted
    /// decreasing, widths from a normalized positive sample.
    pub fn random(rng: &mut impl Rng, n_steps: usize, kappa: f64) -> Self {
        let n = n_steps.max(1);
        let mut widths: Vec<f64> = (0..n)
            .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
            .collect();
        let total: f64 = widths.iter().sum();
        for w in &mut widths {
            *w *= kappa / total;
        }
        let mut logs: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        logs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let scale = rng.random_range(0.25..4.0);
        let values: Vec<f64> = logs.iter().map(|l| scale * l.exp()).collect();
        let mut breakpoints = Vec::with_capacity(n - 1);
        let mut acc = 0.0;
        for w in widths.iter().take(n - 1) {
            acc += w;
            breakpoints.push(acc);
        }
        Self::new(kappa, breakpoints, values).expect("generated step function is valid")
    }
}
