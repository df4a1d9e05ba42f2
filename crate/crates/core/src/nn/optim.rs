use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Global-norm gradient clip; `None` disables clipping.
    pub clip: Option<f64>,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 3e-4, beta1: 0.9, beta2: 0.999, eps: 1e-8, clip: Some(1.0) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    cfg: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

pub fn global_norm(g: &[f64]) -> f64 {
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Rescales `g` in place so its Euclidean norm is at most `max`. Returns the
/// norm before clipping.
pub fn clip_global_norm(g: &mut [f64], max: f64) -> f64 {
    let norm = global_norm(g);
    if norm > max {
        let s = max / norm;
        for x in g.iter_mut() {
            *x *= s;
        }
    }
    norm
}

impl Adam {
    pub fn new(n_params: usize, cfg: AdamConfig) -> Self {
        Self { cfg, m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    pub fn config(&self) -> &AdamConfig {
        &self.cfg
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Clips `grads` to the configured global norm, then applies one
    /// bias-corrected Adam step to `params`. Returns the pre-clip norm.
    pub fn step(&mut self, params: &mut [f64], grads: &mut [f64]) -> f64 {
        assert_eq!(params.len(), self.m.len(), "optimizer/parameter size");
        assert_eq!(grads.len(), self.m.len(), "gradient/parameter size");
        let norm = match self.cfg.clip {
            Some(c) => clip_global_norm(grads, c),
            None => global_norm(grads),
        };
        self.t += 1;
        let AdamConfig { lr, beta1: b1, beta2: b2, eps, .. } = self.cfg;
        let c1 = 1.0 - b1.powi(self.t as i32);
        let c2 = 1.0 - b2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * g;
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * g * g;
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + eps);
        }
        norm
    }
}

/// Huber loss with unit threshold and its derivative in the error.
pub fn huber(e: f64) -> (f64, f64) {
    if e.abs() <= 1.0 {
        (0.5 * e * e, e)
    } else {
        (e.abs() - 0.5, e.signum())
    }
}
