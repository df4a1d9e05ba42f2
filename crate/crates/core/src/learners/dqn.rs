use rand::Rng;

use super::batch::Batch;
use super::config::LearnerConfig;
use crate::action::N_DISCRETE;
use crate::arbitration::epsilon_greedy;
use crate::error::Result;
use crate::nn::{huber, param_hash, Adam, Mlp, NetFile};

/// Double-DQN over the 20 discrete actions.
#[derive(Clone, Debug)]
pub struct DqnLearner {
    cfg: LearnerConfig,
    online: Mlp,
    target: Mlp,
    adam: Adam,
    updates: u64,
}

/// Loss, parameter gradient and per-sample TD errors for one batch.
#[derive(Clone, Debug)]
pub struct DqnLoss {
    pub loss: f64,
    pub grad: Vec<f64>,
    pub td: Vec<f64>,
}

impl DqnLearner {
    pub fn new<R: Rng + ?Sized>(input_dim: usize, cfg: LearnerConfig, rng: &mut R) -> Self {
        let mut dims = vec![input_dim];
        dims.extend(&cfg.hidden);
        dims.push(N_DISCRETE);
        Self::from_net(Mlp::new(&dims, rng), cfg)
    }

    /// Wraps an existing network; the target starts as a copy.
    pub fn from_net(online: Mlp, cfg: LearnerConfig) -> Self {
        let adam = Adam::new(online.params().len(), cfg.adam);
        Self { target: online.clone(), online, adam, cfg, updates: 0 }
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    pub fn online(&self) -> &Mlp {
        &self.online
    }

    pub fn target(&self) -> &Mlp {
        &self.target
    }

    pub fn target_mut(&mut self) -> &mut Mlp {
        &mut self.target
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn q_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.online.predict(x, 1)
    }

    /// Uniform action with probability `epsilon`, else greedy (lowest index on ties).
    pub fn act<R: Rng + ?Sized>(&self, x: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
        Ok(epsilon_greedy(&self.q_values(x)?, epsilon, rng))
    }

    /// `r` for terminal transitions, else `r + gamma * Q_target(s', argmax_a Q_online(s', a))`.
    pub fn targets(&self, b: &Batch) -> Result<Vec<f64>> {
        let q_on = self.online.predict(&b.s_next, b.n)?;
        let q_tg = self.target.predict(&b.s_next, b.n)?;
        Ok((0..b.n)
            .map(|i| {
                if b.done[i] {
                    return b.r[i];
                }
                let row = &q_on[i * N_DISCRETE..(i + 1) * N_DISCRETE];
                let best = (0..N_DISCRETE).fold(0, |k, j| if row[j] > row[k] { j } else { k });
                b.r[i] + self.cfg.gamma * q_tg[i * N_DISCRETE + best]
            })
            .collect())
    }

    /// `mean_i w_i * huber(Q(s_i, a_i) - y_i)` with targets held fixed.
    pub fn loss_and_grad(&self, b: &Batch, weights: &[f64], y: &[f64]) -> Result<DqnLoss> {
        let fwd = self.online.forward(&b.s, b.n)?;
        let q = fwd.output();
        let mut dout = vec![0.0; b.n * N_DISCRETE];
        let mut loss = 0.0;
        let mut td = Vec::with_capacity(b.n);
        let inv_n = 1.0 / b.n as f64;
        for i in 0..b.n {
            let k = i * N_DISCRETE + b.discrete[i];
            let e = q[k] - y[i];
            let (l, g) = huber(e);
            loss += weights[i] * l * inv_n;
            dout[k] = weights[i] * g * inv_n;
            td.push(e.abs());
        }
        let grad = self.online.backward(&fwd, &dout).params;
        Ok(DqnLoss { loss, grad, td })
    }

    /// One clipped Adam step and a soft target update. Returns |TD|.
    pub fn update(&mut self, b: &Batch, weights: &[f64]) -> Result<Vec<f64>> {
        let y = self.targets(b)?;
        let DqnLoss { mut grad, td, .. } = self.loss_and_grad(b, weights, &y)?;
        self.adam.step(self.online.params_mut(), &mut grad);
        self.target.soft_update_from(&self.online, self.cfg.tau);
        self.updates += 1;
        Ok(td)
    }

    pub fn nets(&self) -> Vec<NetFile> {
        vec![self.online.to_file(), self.target.to_file()]
    }

    pub fn hash(&self) -> String {
        param_hash(&[self.online.params(), self.target.params()].concat())
    }
}
