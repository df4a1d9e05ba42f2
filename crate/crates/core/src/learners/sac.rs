use rand::Rng;
use rand_distr::StandardNormal;

use super::batch::Batch;
use super::config::LearnerConfig;
use crate::error::Result;
use crate::nn::{huber, param_hash, Adam, Forward, Mlp, NetFile};

pub const ACTION_DIM: usize = 2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ln(1 - tanh(u)^2)` without cancellation for large |u|.
fn log_one_minus_tanh_sq(u: f64) -> f64 {
    2.0 * (std::f64::consts::LN_2 - u - softplus(-2.0 * u))
}

/// Squashed-Gaussian policy evaluated on a batch with fixed noise.
#[derive(Clone, Debug)]
pub struct PolicyEval {
    /// `tanh(mean + std * noise)`, row-major `n x 2`.
    pub action: Vec<f64>,
    pub log_prob: Vec<f64>,
    pub std: Vec<f64>,
    pub noise: Vec<f64>,
    /// Whether each log-std lay inside the clamp range (gradient passes).
    pub log_std_free: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct CriticLoss {
    pub loss: [f64; 2],
    pub grads: [Vec<f64>; 2],
    /// `|min(Q1, Q2)(s, a) - y|` per sample.
    pub td: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ActorLoss {
    pub loss: f64,
    pub grad: Vec<f64>,
    pub log_prob: Vec<f64>,
}

/// Soft actor-critic with twin critics and a learned entropy coefficient.
#[derive(Clone, Debug)]
pub struct SacLearner {
    cfg: LearnerConfig,
    dim: usize,
    actor: Mlp,
    critics: [Mlp; 2],
    targets: [Mlp; 2],
    log_alpha: f64,
    adam_actor: Adam,
    adam_critics: [Adam; 2],
    adam_alpha: Adam,
    updates: u64,
}

fn with_actions(s: &[f64], a: &[f64], n: usize, dim: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(n * (dim + ACTION_DIM));
    for i in 0..n {
        x.extend_from_slice(&s[i * dim..(i + 1) * dim]);
        x.extend_from_slice(&a[i * ACTION_DIM..(i + 1) * ACTION_DIM]);
    }
    x
}

impl SacLearner {
    pub fn new<R: Rng + ?Sized>(input_dim: usize, cfg: LearnerConfig, rng: &mut R) -> Self {
        let dims = |i: usize, o: usize| {
            let mut d = vec![i];
            d.extend(&cfg.hidden);
            d.push(o);
            d
        };
        let actor = Mlp::new(&dims(input_dim, 2 * ACTION_DIM), rng);
        let q1 = Mlp::new(&dims(input_dim + ACTION_DIM, 1), rng);
        let q2 = Mlp::new(&dims(input_dim + ACTION_DIM, 1), rng);
        let adam = cfg.adam;
        Self {
            dim: input_dim,
            adam_actor: Adam::new(actor.params().len(), adam),
            adam_critics: [Adam::new(q1.params().len(), adam), Adam::new(q2.params().len(), adam)],
            adam_alpha: Adam::new(1, adam),
            targets: [q1.clone(), q2.clone()],
            critics: [q1, q2],
            actor,
            log_alpha: cfg.init_log_alpha,
            cfg,
            updates: 0,
        }
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn actor_mut(&mut self) -> &mut Mlp {
        &mut self.actor
    }

    pub fn critic(&self, i: usize) -> &Mlp {
        &self.critics[i]
    }

    pub fn critic_mut(&mut self, i: usize) -> &mut Mlp {
        &mut self.critics[i]
    }

    pub fn target(&self, i: usize) -> &Mlp {
        &self.targets[i]
    }

    pub fn target_mut(&mut self, i: usize) -> &mut Mlp {
        &mut self.targets[i]
    }

    pub fn log_alpha(&self) -> f64 {
        self.log_alpha
    }

    pub fn set_log_alpha(&mut self, v: f64) {
        self.log_alpha = v;
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Evaluates the policy on `n` encodings with the given standard-normal
    /// noise (`n x 2`); zero noise yields the squashed mean.
    pub fn policy(&self, x: &[f64], n: usize, noise: &[f64]) -> Result<(Forward, PolicyEval)> {
        let fwd = self.actor.forward(x, n)?;
        let out = fwd.output();
        let mut ev = PolicyEval {
            action: Vec::with_capacity(n * ACTION_DIM),
            log_prob: Vec::with_capacity(n),
            std: Vec::with_capacity(n * ACTION_DIM),
            noise: noise.to_vec(),
            log_std_free: Vec::with_capacity(n * ACTION_DIM),
        };
        for i in 0..n {
            let row = &out[i * 2 * ACTION_DIM..(i + 1) * 2 * ACTION_DIM];
            let mut lp = 0.0;
            for j in 0..ACTION_DIM {
                let raw = row[ACTION_DIM + j];
                let log_std = raw.clamp(self.cfg.log_std_min, self.cfg.log_std_max);
                let std = log_std.exp();
                let xi = noise[i * ACTION_DIM + j];
                let u = row[j] + std * xi;
                lp += -0.5 * xi * xi - log_std - HALF_LN_2PI - log_one_minus_tanh_sq(u);
                ev.action.push(u.tanh());
                ev.std.push(std);
                ev.log_std_free.push(raw >= self.cfg.log_std_min && raw <= self.cfg.log_std_max);
            }
            ev.log_prob.push(lp);
        }
        Ok((fwd, ev))
    }

    /// Normalized action in [-1, 1]^2: a policy sample, or the squashed mean
    /// when `deterministic`.
    pub fn act<R: Rng + ?Sized>(&self, x: &[f64], deterministic: bool, rng: &mut R) -> Result<[f64; 2]> {
        let noise: Vec<f64> = if deterministic {
            vec![0.0; ACTION_DIM]
        } else {
            (0..ACTION_DIM).map(|_| rng.sample(StandardNormal)).collect()
        };
        let (_, ev) = self.policy(x, 1, &noise)?;
        Ok([ev.action[0], ev.action[1]])
    }

    /// Clipped double-Q soft targets with next actions drawn using `noise_next`.
    pub fn critic_targets(&self, b: &Batch, noise_next: &[f64]) -> Result<Vec<f64>> {
        let (_, ev) = self.policy(&b.s_next, b.n, noise_next)?;
        let x = with_actions(&b.s_next, &ev.action, b.n, self.dim);
        let t1 = self.targets[0].predict(&x, b.n)?;
        let t2 = self.targets[1].predict(&x, b.n)?;
        let alpha = self.alpha();
        Ok((0..b.n)
            .map(|i| {
                if b.done[i] {
                    b.r[i]
                } else {
                    b.r[i] + self.cfg.gamma * (t1[i].min(t2[i]) - alpha * ev.log_prob[i])
                }
            })
            .collect())
    }

    /// IS-weighted Huber regression of both critics onto fixed targets.
    pub fn critic_loss_and_grads(&self, b: &Batch, weights: &[f64], y: &[f64]) -> Result<CriticLoss> {
        let x = with_actions(&b.s, &b.continuous, b.n, self.dim);
        let inv_n = 1.0 / b.n as f64;
        let mut loss = [0.0; 2];
        let mut preds = Vec::with_capacity(2);
        let mut grads: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for (c, net) in self.critics.iter().enumerate() {
            let fwd = net.forward(&x, b.n)?;
            let q = fwd.output().to_vec();
            let mut dout = vec![0.0; b.n];
            for i in 0..b.n {
                let (l, g) = huber(q[i] - y[i]);
                loss[c] += weights[i] * l * inv_n;
                dout[i] = weights[i] * g * inv_n;
            }
            grads[c] = net.backward(&fwd, &dout).params;
            preds.push(q);
        }
        let td = (0..b.n).map(|i| (preds[0][i].min(preds[1][i]) - y[i]).abs()).collect();
        Ok(CriticLoss { loss, grads, td })
    }

    /// `mean(alpha * log pi(a|s) - min(Q1, Q2)(s, a))` over reparameterized
    /// samples `a = tanh(mean + std * noise)`; gradient is for the actor only.
    pub fn actor_loss_and_grad(&self, b: &Batch, noise: &[f64]) -> Result<ActorLoss> {
        let (fwd, ev) = self.policy(&b.s, b.n, noise)?;
        let x = with_actions(&b.s, &ev.action, b.n, self.dim);
        let f1 = self.critics[0].forward(&x, b.n)?;
        let f2 = self.critics[1].forward(&x, b.n)?;
        let (q1, q2) = (f1.output(), f2.output());
        let use_first: Vec<bool> = (0..b.n).map(|i| q1[i] <= q2[i]).collect();
        let d1: Vec<f64> = use_first.iter().map(|&u| f64::from(u)).collect();
        let d2: Vec<f64> = use_first.iter().map(|&u| f64::from(!u)).collect();
        let g1 = self.critics[0].input_gradient(&f1, &d1);
        let g2 = self.critics[1].input_gradient(&f2, &d2);
        let alpha = self.alpha();
        let inv_n = 1.0 / b.n as f64;
        let w = self.dim + ACTION_DIM;
        let mut loss = 0.0;
        let mut dout = vec![0.0; b.n * 2 * ACTION_DIM];
        for i in 0..b.n {
            let qmin = if use_first[i] { q1[i] } else { q2[i] };
            loss += (alpha * ev.log_prob[i] - qmin) * inv_n;
            for j in 0..ACTION_DIM {
                let k = i * ACTION_DIM + j;
                let a = ev.action[k];
                let dq_da = g1[i * w + self.dim + j] + g2[i * w + self.dim + j];
                let dq_du = dq_da * (1.0 - a * a);
                let sx = ev.std[k] * ev.noise[k];
                dout[i * 2 * ACTION_DIM + j] = (alpha * 2.0 * a - dq_du) * inv_n;
                if ev.log_std_free[k] {
                    dout[i * 2 * ACTION_DIM + ACTION_DIM + j] = (alpha * (-1.0 + 2.0 * a * sx) - dq_du * sx) * inv_n;
                }
            }
        }
        let grad = self.actor.backward(&fwd, &dout).params;
        Ok(ActorLoss { loss, grad, log_prob: ev.log_prob })
    }

    /// Entropy-coefficient objective `-log_alpha * mean(log pi + target_entropy)`
    /// and its derivative in `log_alpha`.
    pub fn alpha_loss_and_grad(&self, log_alpha: f64, log_prob: &[f64]) -> (f64, f64) {
        let m = log_prob.iter().map(|lp| lp + self.cfg.target_entropy).sum::<f64>() / log_prob.len() as f64;
        (-log_alpha * m, -m)
    }

    /// One critic, actor and entropy-coefficient step followed by soft target
    /// updates. Returns |TD| from the min-critic.
    pub fn update<R: Rng + ?Sized>(&mut self, b: &Batch, weights: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        let noise_next: Vec<f64> = (0..b.n * ACTION_DIM).map(|_| rng.sample(StandardNormal)).collect();
        let noise: Vec<f64> = (0..b.n * ACTION_DIM).map(|_| rng.sample(StandardNormal)).collect();
        let y = self.critic_targets(b, &noise_next)?;
        let CriticLoss { mut grads, td, .. } = self.critic_loss_and_grads(b, weights, &y)?;
        for c in 0..2 {
            self.adam_critics[c].step(self.critics[c].params_mut(), &mut grads[c]);
        }
        let ActorLoss { mut grad, log_prob, .. } = self.actor_loss_and_grad(b, &noise)?;
        self.adam_actor.step(self.actor.params_mut(), &mut grad);
        let (_, g_alpha) = self.alpha_loss_and_grad(self.log_alpha, &log_prob);
        let mut la = [self.log_alpha];
        self.adam_alpha.step(&mut la, &mut [g_alpha]);
        self.log_alpha = la[0];
        for c in 0..2 {
            self.targets[c].soft_update_from(&self.critics[c], self.cfg.tau);
        }
        self.updates += 1;
        Ok(td)
    }

    pub fn nets(&self) -> Vec<NetFile> {
        let mut v = vec![self.actor.to_file()];
        v.extend(self.critics.iter().map(Mlp::to_file));
        v.extend(self.targets.iter().map(Mlp::to_file));
        v
    }

    pub fn hash(&self) -> String {
        let mut all = self.actor.params().to_vec();
        for n in self.critics.iter().chain(&self.targets) {
            all.extend_from_slice(n.params());
        }
        all.push(self.log_alpha);
        param_hash(&all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn tiny(seed: u64) -> SacLearner {
        let cfg = LearnerConfig { hidden: vec![8, 8], ..Default::default() };
        let mut l = SacLearner::new(4, cfg, &mut stream(seed, &[], Stream::Init));
        let mut rng = stream(seed, &[1], Stream::Init);
        for p in l.actor.params_mut() {
            *p += rng.random_range(-0.3..0.3);
        }
        for c in 0..2 {
            for p in l.critics[c].params_mut() {
                *p += rng.random_range(-0.3..0.3);
            }
            for p in l.targets[c].params_mut() {
                *p += rng.random_range(-0.3..0.3);
            }
        }
        l.log_alpha = -0.7;
        l
    }

    fn batch(done0: bool) -> Batch {
        Batch {
            n: 3,
            dim: 4,
            s: vec![0.1, 0.2, 0.3, 0.4, -0.5, 0.1, 0.0, 0.9, 0.3, -0.3, 0.7, -0.1],
            s_next: vec![0.2, 0.1, 0.0, -0.2, 0.4, 0.4, -0.6, 0.1, 0.0, 0.5, 0.2, 0.3],
            r: vec![1.5, -0.4, 0.2],
            done: vec![done0, false, false],
            discrete: vec![],
            continuous: vec![0.3, -0.2, -0.9, 0.5, 0.0, 0.99],
        }
    }

    const NOISE: [f64; 6] = [0.3, -1.2, 0.8, 0.1, -0.4, 1.7];

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
    }

    #[test]
    fn deterministic_zero_mean_is_midpoint() {
        let l = SacLearner::new(4, LearnerConfig { hidden: vec![4], ..Default::default() }, &mut stream(0, &[], Stream::Init));
        let mut l = l;
        l.actor.params_mut().fill(0.0);
        let a = l.act(&[0.1, 0.2, 0.3, 0.4], true, &mut stream(0, &[], Stream::Exploration)).unwrap();
        assert_eq!(a, [0.0, 0.0]);
    }

    #[test]
    fn samples_stay_in_bounds() {
        let l = tiny(1);
        let mut rng = stream(2, &[], Stream::Exploration);
        for _ in 0..1000 {
            let a = l.act(&[0.5, -0.5, 1.0, -1.0], false, &mut rng).unwrap();
            assert!(a.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn log_prob_matches_direct_formula() {
        let l = tiny(3);
        let x = [0.1, 0.2, 0.3, 0.4];
        let (fwd, ev) = l.policy(&x, 1, &[0.5, -0.25]).unwrap();
        let o = fwd.output();
        let mut lp = 0.0;
        for j in 0..2 {
            let ls = o[2 + j].clamp(-20.0, 2.0);
            let u = o[j] + ls.exp() * [0.5, -0.25][j];
            let a = u.tanh();
            lp += -0.5 * [0.5f64, -0.25][j].powi(2) - ls - 0.5 * (2.0 * std::f64::consts::PI).ln() - (1.0 - a * a).ln();
        }
        assert!(rel(lp, ev.log_prob[0]) < 1e-10);
    }

    #[test]
    fn terminal_critic_target_is_reward() {
        let y = tiny(0).critic_targets(&batch(true), &NOISE).unwrap();
        assert_eq!(y[0], 1.5);
    }

    #[test]
    fn clipped_target_not_above_either_critic() {
        let l = tiny(5);
        let b = batch(false);
        let y = l.critic_targets(&b, &NOISE).unwrap();
        let (_, ev) = l.policy(&b.s_next, b.n, &NOISE).unwrap();
        let x = with_actions(&b.s_next, &ev.action, b.n, 4);
        let t1 = l.targets[0].predict(&x, b.n).unwrap();
        let t2 = l.targets[1].predict(&x, b.n).unwrap();
        for i in 0..b.n {
            let soft = |t: f64| b.r[i] + 0.99 * (t - l.alpha() * ev.log_prob[i]);
            assert!(y[i] <= soft(t1[i]) + 1e-12 && y[i] <= soft(t2[i]) + 1e-12);
        }
    }

    #[test]
    fn critic_gradients_match_finite_differences() {
        let l = tiny(6);
        let b = batch(false);
        let w = [0.4, 1.0, 0.8];
        let y = vec![2.5, -0.3, 0.1];
        let g = l.critic_loss_and_grads(&b, &w, &y).unwrap();
        let h = 1e-5;
        for c in 0..2 {
            for k in 0..g.grads[c].len() {
                let mut p = l.clone();
                p.critics[c].params_mut()[k] += h;
                let mut m = l.clone();
                m.critics[c].params_mut()[k] -= h;
                let fd = (p.critic_loss_and_grads(&b, &w, &y).unwrap().loss[c] - m.critic_loss_and_grads(&b, &w, &y).unwrap().loss[c]) / (2.0 * h);
                assert!(rel(fd, g.grads[c][k]) < 1e-4, "critic {c} param {k}: {fd} vs {}", g.grads[c][k]);
            }
        }
    }

    #[test]
    fn actor_gradient_matches_finite_differences() {
        for seed in 0..3 {
            let l = tiny(seed);
            let b = batch(false);
            let g = l.actor_loss_and_grad(&b, &NOISE).unwrap().grad;
            let h = 1e-5;
            for k in 0..g.len() {
                let mut p = l.clone();
                p.actor.params_mut()[k] += h;
                let mut m = l.clone();
                m.actor.params_mut()[k] -= h;
                let fd = (p.actor_loss_and_grad(&b, &NOISE).unwrap().loss - m.actor_loss_and_grad(&b, &NOISE).unwrap().loss) / (2.0 * h);
                assert!(rel(fd, g[k]) < 1e-4, "seed {seed} param {k}: {fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn alpha_gradient_and_direction() {
        let l = tiny(0);
        let lp = [-5.0, -4.0];
        let (_, g) = l.alpha_loss_and_grad(0.3, &lp);
        let h = 1e-5;
        let fd = (l.alpha_loss_and_grad(0.3 + h, &lp).0 - l.alpha_loss_and_grad(0.3 - h, &lp).0) / (2.0 * h);
        assert!(rel(fd, g) < 1e-8);
        // Entropy far above target (very negative log-probs): alpha should fall.
        assert!(g > 0.0);
        let (_, g) = l.alpha_loss_and_grad(0.3, &[10.0, 12.0]);
        assert!(g < 0.0);
    }

    #[test]
    fn update_is_deterministic_and_finite() {
        let run = || {
            let mut l = tiny(7);
            let mut rng = stream(7, &[], Stream::Update);
            for _ in 0..20 {
                l.update(&batch(false), &[1.0, 0.5, 0.8], &mut rng).unwrap();
            }
            l
        };
        let (a, b) = (run(), run());
        assert_eq!(a.hash(), b.hash());
        assert!(a.actor.is_finite() && a.critics.iter().all(Mlp::is_finite));
        assert_eq!(a.updates(), 20);
    }
}
