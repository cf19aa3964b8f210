//! Report formatting. Floats print with 17 significant digits so every
//! emitted value round-trips losslessly.

use mbound_core::BoundResult;
use std::path::Path;

pub const CSV_HEADER: &str = "s1,s2,t_sharp,t_zero,case_tag,omega_p_s1,beta_star";

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// One result cell of a bound computation or sweep.
pub struct Row {
    pub s1: f64,
    pub s2: f64,
    pub result: Option<BoundResult>,
    pub tag_override: Option<&'static str>,
}

impl Row {
    pub fn solved(s1: f64, s2: f64, r: &BoundResult) -> Self {
        Self {
            s1,
            s2,
            result: Some(r.clone()),
            tag_override: None,
        }
    }

    pub fn infeasible(s1: f64, s2: f64) -> Self {
        Self {
            s1,
            s2,
            result: None,
            tag_override: Some("INFEASIBLE"),
        }
    }

    pub fn failed(s1: f64, s2: f64, _e: &mbound_core::Error) -> Self {
        Self {
            s1,
            s2,
            result: None,
            tag_override: Some("ERROR"),
        }
    }

    fn tag(&self) -> &str {
        match (&self.result, self.tag_override) {
            (_, Some(t)) => t,
            (Some(r), None) => r.case_tag.as_str(),
            (None, None) => "ERROR",
        }
    }

    pub fn csv(&self) -> String {
        match &self.result {
            Some(r) => format!(
                "{},{},{},{},{},{},{}",
                fmt17(self.s1),
                fmt17(self.s2),
                fmt17(r.t_sharp),
                fmt17(r.t_zero),
                r.case_tag.as_str(),
                fmt17(r.omega_p_s1),
                r.beta_star.map(fmt17).unwrap_or_default()
            ),
            None => format!(
                "{},{},,,{},,",
                fmt17(self.s1),
                fmt17(self.s2),
                self.tag()
            ),
        }
    }

    pub fn json_value(&self) -> serde_json::Value {
        match &self.result {
            Some(r) => serde_json::json!({
                "s1": self.s1,
                "s2": self.s2,
                "t_sharp": r.t_sharp,
                "t_zero": r.t_zero,
                "case_tag": r.case_tag.as_str(),
                "f_at_t_zero": r.f_at_t_zero,
                "omega_p_s1": r.omega_p_s1,
                "beta_star": r.beta_star,
            }),
            None => serde_json::json!({
                "s1": self.s1,
                "s2": self.s2,
                "case_tag": self.tag(),
            }),
        }
    }

    pub fn json(&self) -> String {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&self.json_value()).unwrap()
        )
    }

    pub fn human(&self) -> String {
        match &self.result {
            Some(r) => {
                let beta_star = r
                    .beta_star
                    .map(fmt17)
                    .unwrap_or_else(|| "-".to_string());
                format!(
                    "s1 = {}\ns2 = {}\nt_sharp = {}\nt_zero = {}\ncase = {}\nf(t_zero) = {}\nomega_p(s1) = {}\nbeta_star = {}\n",
                    fmt17(self.s1),
                    fmt17(self.s2),
                    fmt17(r.t_sharp),
                    fmt17(r.t_zero),
                    r.case_tag.as_str(),
                    fmt17(r.f_at_t_zero),
                    fmt17(r.omega_p_s1),
                    beta_star
                )
            }
            None => format!(
                "s1 = {}\ns2 = {}\ncase = {}\n",
                fmt17(self.s1),
                fmt17(self.s2),
                self.tag()
            ),
        }
    }
}

pub fn write_out(path: Option<&Path>, text: &str) -> Result<(), super::Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| super::Failure {
            code: super::EXIT_DATA,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
