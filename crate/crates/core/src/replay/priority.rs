use serde::{Deserialize, Serialize};

use crate::advisor::Regime;

/// Per-regime priority multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeWeights {
    pub emg: f64,
    pub obs: f64,
    pub nom: f64,
}

impl ModeWeights {
    pub fn get(&self, m: Regime) -> f64 {
        match m {
            Regime::Emergency => self.emg,
            Regime::Avoidance => self.obs,
            Regime::Nominal => self.nom,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorityParams {
    pub alpha: f64,
    pub eps: f64,
    pub w_mode: ModeWeights,
    /// Slope of the risk multiplier in the clearance deficit.
    pub risk_gain: f64,
    pub w_risk_max: f64,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for PriorityParams {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            eps: 1e-6,
            w_mode: ModeWeights { emg: 1.5, obs: 1.2, nom: 1.0 },
            risk_gain: 0.5,
            w_risk_max: 1.5,
            beta_start: 0.4,
            beta_end: 1.0,
        }
    }
}

/// Advisor context captured when a transition is stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayMeta {
    pub regime: Regime,
    pub d_min: f64,
    pub in_rec: bool,
    pub in_avoid: bool,
}

/// Risk multiplier: 1 at or beyond `r_avoid`, rising linearly to the cap as
/// clearance goes to zero.
pub fn risk_weight(d_min: f64, r_avoid: f64, p: &PriorityParams) -> f64 {
    let deficit = ((r_avoid - d_min) / r_avoid).max(0.0);
    (1.0 + p.risk_gain * deficit).clamp(1.0, p.w_risk_max)
}

pub fn compute_priority(td_error: f64, meta: &ReplayMeta, r_avoid: f64, p: &PriorityParams) -> f64 {
    (td_error.abs() + p.eps).powf(p.alpha) * p.w_mode.get(meta.regime) * risk_weight(meta.d_min, r_avoid, p)
}

/// Linear anneal of the importance-sampling exponent over `steps` updates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaSchedule {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl BetaSchedule {
    pub fn value(&self, t: usize) -> f64 {
        if self.steps == 0 {
            return self.end;
        }
        let f = (t as f64 / self.steps as f64).min(1.0);
        self.start * (1.0 - f) + self.end * f
    }
}
