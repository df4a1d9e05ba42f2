use serde::{Deserialize, Serialize};

use crate::nn::AdamConfig;

/// Settings shared by both learners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub gamma: f64,
    pub hidden: Vec<usize>,
    pub adam: AdamConfig,
    pub tau: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Records required before updates start in single-episode deployment.
    pub warmup_online: usize,
    /// Records required before updates start in budgeted training.
    pub warmup_pretrain: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    pub eps_decay_steps: usize,
    pub target_entropy: f64,
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub init_log_alpha: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            hidden: vec![256, 256],
            adam: AdamConfig::default(),
            tau: 0.005,
            batch_size: 256,
            buffer_capacity: 1_000_000,
            warmup_online: 64,
            warmup_pretrain: 1000,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_steps: 200_000,
            target_entropy: -2.0,
            log_std_min: -20.0,
            log_std_max: 2.0,
            init_log_alpha: 0.0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(format!("learner.gamma must lie in [0, 1], got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(format!("learner.tau must lie in [0, 1], got {}", self.tau));
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err("learner.hidden must list positive layer widths".into());
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 {
            return Err("learner.batch_size and learner.buffer_capacity must be positive".into());
        }
        if !(self.eps_end <= self.eps_start && self.eps_end >= 0.0 && self.eps_start <= 1.0) {
            return Err("learner epsilon schedule must satisfy 0 <= eps_end <= eps_start <= 1".into());
        }
        if self.log_std_min >= self.log_std_max {
            return Err("learner.log_std_min must be below learner.log_std_max".into());
        }
        if self.adam.lr <= 0.0 {
            return Err("learner.adam.lr must be positive".into());
        }
        Ok(())
    }

    /// Linear decay from `eps_start` to `eps_end` over `eps_decay_steps`
    /// cumulative environment steps.
    pub fn epsilon(&self, step: usize) -> f64 {
        if self.eps_decay_steps == 0 {
            return self.eps_end;
        }
        let f = (step as f64 / self.eps_decay_steps as f64).min(1.0);
        self.eps_start * (1.0 - f) + self.eps_end * f
    }
}
