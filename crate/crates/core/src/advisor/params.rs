use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Clearance regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "emg")]
    Emergency,
    #[serde(rename = "obs")]
    Avoidance,
    #[serde(rename = "nom")]
    Nominal,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Emergency, Regime::Avoidance, Regime::Nominal];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Emergency => "emg",
            Regime::Avoidance => "obs",
            Regime::Nominal => "nom",
        }
    }
}

/// Arbitration weights `(avoid, rec, exp)`, serialized as a triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Weights {
    pub avoid: f64,
    pub rec: f64,
    pub exp: f64,
}

impl Weights {
    pub const fn new(avoid: f64, rec: f64, exp: f64) -> Self {
        Self { avoid, rec, exp }
    }

    pub fn sum(&self) -> f64 {
        self.avoid + self.rec + self.exp
    }
}

impl From<[f64; 3]> for Weights {
    fn from([a, r, e]: [f64; 3]) -> Self {
        Self::new(a, r, e)
    }
}

impl From<Weights> for [f64; 3] {
    fn from(w: Weights) -> Self {
        [w.avoid, w.rec, w.exp]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeWeights {
    pub emergency: Weights,
    pub avoidance: Weights,
    pub nominal: Weights,
}

impl Default for RegimeWeights {
    fn default() -> Self {
        Self {
            emergency: Weights::new(0.55, 0.35, 0.10),
            avoidance: Weights::new(0.35, 0.40, 0.25),
            nominal: Weights::new(0.15, 0.30, 0.55),
        }
    }
}

/// Advisor thresholds, speed caps and weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdvisorParams {
    pub r_stop: f64,
    pub r_avoid: f64,
    /// Carried for completeness; no rule branches on it.
    pub r_clear: f64,
    pub d_near: f64,
    pub v_max: f64,
    pub v_stop: f64,
    pub v_avoid: f64,
    pub v_clear: f64,
    pub v_near: f64,
    pub dpsi_max: f64,
    pub dpsi_nom: f64,
    pub dpsi_avoid: f64,
    pub dpsi_emg: f64,
    pub top_k: usize,
    pub b_warn: f64,
    pub b_crit: f64,
    pub w_stuck: usize,
    pub eps_prog: f64,
    pub delta: f64,
    pub t_cool: usize,
    pub weights: RegimeWeights,
}

impl Default for AdvisorParams {
    fn default() -> Self {
        Self {
            r_stop: 1.0,
            r_avoid: 2.0,
            r_clear: 5.0,
            d_near: 3.0,
            v_max: 4.0,
            v_stop: 0.5,
            v_avoid: 2.0,
            v_clear: 4.0,
            v_near: 1.0,
            dpsi_max: PI / 6.0,
            dpsi_nom: PI / 18.0,
            dpsi_avoid: PI / 10.0,
            dpsi_emg: PI / 6.0,
            top_k: 2,
            b_warn: 0.25,
            b_crit: 0.05,
            w_stuck: 10,
            eps_prog: 1.0,
            delta: 0.20,
            t_cool: 40,
            weights: RegimeWeights::default(),
        }
    }
}

impl AdvisorParams {
    /// Checks the ordering constraints; the error names the violated one.
    pub fn validate(&self) -> Result<(), String> {
        let checks = [
            (self.v_stop <= self.v_avoid, "v_stop <= v_avoid"),
            (self.v_avoid <= self.v_clear, "v_avoid <= v_clear"),
            (self.v_clear <= self.v_max, "v_clear <= v_max"),
            (self.v_near <= self.v_clear, "v_near <= v_clear"),
            (self.r_stop < self.r_avoid, "r_stop < r_avoid"),
            (self.r_avoid < self.r_clear, "r_avoid < r_clear"),
            (self.b_warn > self.b_crit, "b_warn > b_crit"),
            (self.top_k >= 1, "top_k >= 1"),
            (self.w_stuck >= 2, "w_stuck >= 2"),
        ];
        if let Some((_, name)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(format!("advisor constraint violated: {name}"));
        }
        for (name, w) in [("emergency", self.weights.emergency), ("avoidance", self.weights.avoidance), ("nominal", self.weights.nominal)] {
            let entries = [w.avoid, w.rec, w.exp];
            if entries.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(format!("weights.{name} entries must lie in [0, 1]"));
            }
            if (w.sum() - 1.0).abs() > 1e-9 {
                return Err(format!("weights.{name} must sum to 1 (got {})", w.sum()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AdvisorParams::default().validate().unwrap();
    }

    #[test]
    fn ordering_violation_is_named() {
        let p = AdvisorParams { v_avoid: 4.5, ..Default::default() };
        let err = p.validate().unwrap_err();
        assert!(err.contains("v_avoid <= v_clear"), "{err}");
    }

    #[test]
    fn weights_must_be_on_simplex() {
        let mut p = AdvisorParams::default();
        p.weights.nominal = Weights::new(0.5, 0.4, 0.2);
        assert!(p.validate().unwrap_err().contains("sum to 1"));
    }
}
