use serde::{Deserialize, Serialize};

use super::config::{ActionSpace, Method, RunConfig};
use super::instance::Instance;
use crate::action::{ContinuousAction, DiscreteAction};
use crate::advisor::{Advisor, AdvisorParams, GoalSelector};
use crate::arbitration::{
    advisor_only_continuous, advisor_only_discrete, behavior_continuous, behavior_discrete, epsilon_greedy, Component,
};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::learners::{encode, Batch, DqnLearner, EncodeScale, LearnerConfig, SacLearner, FEATURE_DIM};
use crate::nn::{Mlp, NetFile};
use crate::replay::{BetaSchedule, BufferStats, ReplayBuffer, ReplayMeta, StoredAction, TransitionRecord};
use crate::rng::{stream, Stream, StreamRng};
use crate::tasks::{Episode, RewardParams, TargetState, TaskKind, Terminal};
use crate::world::EnergyModel;

/// Environment-side settings shared by every episode of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunContext {
    pub advisor: AdvisorParams,
    pub reward: RewardParams,
    pub energy: EnergyModel,
    pub advisor_only: ActionSpace,
}

impl RunContext {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { advisor: cfg.advisor.clone(), reward: cfg.reward.clone(), energy: cfg.energy.clone(), advisor_only: cfg.advisor_only_actions }
    }
}

#[derive(Clone, Debug)]
pub enum Policy {
    Dqn(DqnLearner),
    Sac(SacLearner),
    Advisor(ActionSpace),
}

/// How an agent is trained within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrainingPlan {
    /// Single-episode deployment: short warmup and batches capped by buffer size.
    pub online: bool,
    /// Gradient steps over which the IS exponent is annealed.
    pub planned_updates: usize,
}

/// A method's policy together with its replay buffer and private streams.
#[derive(Clone, Debug)]
pub struct Agent {
    method: Method,
    policy: Policy,
    buffer: Option<ReplayBuffer>,
    learner_cfg: LearnerConfig,
    plan: TrainingPlan,
    beta: BetaSchedule,
    env_steps: usize,
    updates: usize,
    replay_rng: StreamRng,
    update_rng: StreamRng,
}

/// Saved learner parameters for frozen evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerCheckpoint {
    pub method: Method,
    pub nets: Vec<NetFile>,
    #[serde(default)]
    pub log_alpha: Option<f64>,
    pub hash: String,
}

impl Agent {
    /// Fresh agent; network init and replay/update streams derive from
    /// `(seed, path)`, so methods sharing an architecture start identical.
    pub fn new(method: Method, cfg: &RunConfig, seed: u64, path: &[u64], plan: TrainingPlan) -> Self {
        let mut init = stream(seed, path, Stream::Init);
        let lc = cfg.learner.clone();
        let policy = match method.action_space(cfg.advisor_only_actions) {
            _ if !method.learns() => Policy::Advisor(cfg.advisor_only_actions),
            ActionSpace::Discrete => Policy::Dqn(DqnLearner::new(FEATURE_DIM, lc.clone(), &mut init)),
            ActionSpace::Continuous => Policy::Sac(SacLearner::new(FEATURE_DIM, lc.clone(), &mut init)),
        };
        let buffer = method
            .learns()
            .then(|| ReplayBuffer::new(method.replay_mode(), lc.buffer_capacity, cfg.replay, cfg.advisor.r_avoid));
        Self {
            method,
            policy,
            buffer,
            beta: BetaSchedule { start: cfg.replay.beta_start, end: cfg.replay.beta_end, steps: plan.planned_updates },
            learner_cfg: lc,
            plan,
            env_steps: 0,
            updates: 0,
            replay_rng: stream(seed, path, Stream::Replay),
            update_rng: stream(seed, path, Stream::Update),
        }
    }

    /// Copy for frozen evaluation: same policy, no replay contents.
    pub fn frozen_copy(&self) -> Agent {
        Agent {
            method: self.method,
            policy: self.policy.clone(),
            buffer: None,
            learner_cfg: self.learner_cfg.clone(),
            plan: self.plan,
            beta: self.beta,
            env_steps: self.env_steps,
            updates: self.updates,
            replay_rng: self.replay_rng.clone(),
            update_rng: self.update_rng.clone(),
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn buffer(&self) -> Option<&ReplayBuffer> {
        self.buffer.as_ref()
    }

    pub fn buffer_stats(&self) -> Option<BufferStats> {
        self.buffer.as_ref().map(ReplayBuffer::stats)
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn env_steps(&self) -> usize {
        self.env_steps
    }

    /// Parameter hash, or `None` for the advisor-only policy.
    pub fn hash(&self) -> Option<String> {
        match &self.policy {
            Policy::Dqn(l) => Some(l.hash()),
            Policy::Sac(l) => Some(l.hash()),
            Policy::Advisor(_) => None,
        }
    }

    pub fn checkpoint(&self) -> Option<LearnerCheckpoint> {
        let (nets, log_alpha) = match &self.policy {
            Policy::Dqn(l) => (l.nets(), None),
            Policy::Sac(l) => (l.nets(), Some(l.log_alpha())),
            Policy::Advisor(_) => return None,
        };
        Some(LearnerCheckpoint { method: self.method, nets, log_alpha, hash: self.hash()? })
    }

    /// Replaces the learner's parameters with a checkpoint's. The checkpoint
    /// must come from the same method and architecture.
    pub fn restore(&mut self, ck: &LearnerCheckpoint) -> Result<()> {
        if ck.method != self.method {
            return Err(Error::Checkpoint(format!("checkpoint is for {}, agent is {}", ck.method.as_str(), self.method.as_str())));
        }
        let net = |i: usize, like: &Mlp| -> Result<Mlp> {
            let f = ck.nets.get(i).ok_or_else(|| Error::Checkpoint(format!("missing network {i}")))?;
            if f.dims != like.dims() {
                return Err(Error::Checkpoint(format!("network {i} dims {:?}, expected {:?}", f.dims, like.dims())));
            }
            Mlp::from_file(f)
        };
        match &mut self.policy {
            Policy::Dqn(l) => {
                let online = net(0, l.online())?;
                let target = net(1, l.target())?;
                *l = DqnLearner::from_net(online, self.learner_cfg.clone());
                *l.target_mut() = target;
            }
            Policy::Sac(l) => {
                *l.actor_mut() = net(0, l.actor())?;
                for c in 0..2 {
                    *l.critic_mut(c) = net(1 + c, l.critic(c))?;
                    *l.target_mut(c) = net(3 + c, l.target(c))?;
                }
                l.set_log_alpha(ck.log_alpha.ok_or_else(|| Error::Checkpoint("missing log_alpha".into()))?);
            }
            Policy::Advisor(_) => return Err(Error::Checkpoint("advisor-only policy has no parameters".into())),
        }
        if self.hash().as_deref() != Some(ck.hash.as_str()) {
            return Err(Error::Checkpoint("parameter hash mismatch".into()));
        }
        Ok(())
    }

    /// Stores a transition and runs at most one gradient step.
    fn observe(&mut self, rec: TransitionRecord) -> Result<()> {
        let Some(buf) = self.buffer.as_mut() else { return Ok(()) };
        buf.push(rec);
        let cfg = &self.learner_cfg;
        let warmup = if self.plan.online { cfg.warmup_online } else { cfg.warmup_pretrain };
        let n = if self.plan.online { cfg.batch_size.min(buf.len()) } else { cfg.batch_size };
        if buf.len() < warmup.max(n) {
            return Ok(());
        }
        let beta = self.beta.value(self.updates);
        let sample = buf.sample(n, beta, &mut self.replay_rng)?;
        let batch = Batch::from_records(&sample.records);
        let (weights, indices) = (sample.weights, sample.indices);
        let td = match &mut self.policy {
            Policy::Dqn(l) => l.update(&batch, &weights)?,
            Policy::Sac(l) => l.update(&batch, &weights, &mut self.update_rng)?,
            Policy::Advisor(_) => return Ok(()),
        };
        buf.update_priorities(&indices, &td);
        self.updates += 1;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpisodeMode {
    /// Behavior policy with exploration; transitions stored and learned from.
    Learn,
    /// Deterministic policy; no replay writes and no updates.
    Frozen,
}

/// Per-episode streams.
#[derive(Clone, Debug)]
pub struct EpisodeRngs {
    pub explore: StreamRng,
    pub arbitrate: StreamRng,
    pub target: StreamRng,
}

impl EpisodeRngs {
    pub fn new(seed: u64, path: &[u64]) -> Self {
        Self {
            explore: stream(seed, path, Stream::Exploration),
            arbitrate: stream(seed, path, Stream::Arbitration),
            target: stream(seed, path, Stream::Target),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepLog {
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub speed: f64,
    pub battery: f64,
    pub d_min: f64,
    pub goal_x: f64,
    pub goal_y: f64,
    pub regime: &'static str,
    pub component: &'static str,
    pub reward: f64,
    pub terminal: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeSummary {
    pub terminal: Terminal,
    pub steps: usize,
    pub ret: f64,
    pub steps_to_success: Option<usize>,
    pub log: Vec<StepLog>,
}

/// Runs one episode of `agent` on `inst`.
pub fn run_episode(
    agent: &mut Agent,
    inst: &Instance,
    ctx: &RunContext,
    mode: EpisodeMode,
    mut rngs: EpisodeRngs,
    keep_log: bool,
) -> Result<EpisodeSummary> {
    let p = &ctx.advisor;
    let target = inst.target_start.map(|t| TargetState::new(t, inst.mission.v_tar, rngs.target.clone()));
    let mut ep = Episode::new(inst.grid.clone(), inst.start, inst.start_yaw, inst.mission.clone(), target, ctx.energy.clone(), ctx.reward.clone())?;
    let scale = EncodeScale { diag: inst.grid.diagonal(), v_max: p.v_max, b_max: ctx.energy.b_max };
    let advisor = Advisor::new(p.clone());
    let advised = agent.method.advised();
    let reassign = advised && inst.mission.kind == TaskKind::MultiGoal;
    let mut selector = GoalSelector::new(p);
    let mut goal = if reassign { selector.select(ep.tracker(), ep.state().position) } else { ep.rule_goal() };
    let frozen = mode == EpisodeMode::Frozen;
    let mut ret = 0.0;
    let mut log = Vec::new();

    while !ep.terminal().is_terminal() {
        let state = ep.state().clone();
        let x = encode(&state, goal, &scale);
        let out = advisor.evaluate(&state, goal);
        let eps = if frozen { 0.0 } else { agent.learner_cfg.epsilon(agent.env_steps) };
        let mut component = None;
        let (cmd, stored, in_rec, in_avoid) = match (&agent.policy, mode) {
            (Policy::Dqn(l), _) => {
                let q = l.q_values(&x)?;
                let a = if advised {
                    let (a, c) = behavior_discrete(&out, &q, eps, &mut rngs.arbitrate);
                    component = Some(c);
                    a
                } else {
                    DiscreteAction(epsilon_greedy(&q, eps, &mut rngs.explore))
                };
                (a.command(), StoredAction::Discrete(a.index()), out.discrete.is_recommended(a), out.discrete.is_avoided(a))
            }
            (Policy::Sac(l), _) => {
                let raw = l.act(&x, frozen, &mut rngs.explore)?;
                let proposal = ContinuousAction::from_normalized(raw, p.v_max, p.dpsi_max);
                let a = if advised {
                    let (a, c) = behavior_continuous(&out, state.yaw, proposal, p, &mut rngs.arbitrate);
                    component = Some(c);
                    a
                } else {
                    proposal
                };
                let heading = state.yaw + a.yaw_change;
                (
                    a.command(state.yaw),
                    StoredAction::Continuous(a.normalized(p.v_max, p.dpsi_max)),
                    out.continuous.in_recommended(heading, a.speed),
                    out.continuous.is_avoided(heading),
                )
            }
            (Policy::Advisor(ActionSpace::Discrete), _) => {
                let a = advisor_only_discrete(&out);
                (a.command(), StoredAction::Discrete(a.index()), out.discrete.is_recommended(a), out.discrete.is_avoided(a))
            }
            (Policy::Advisor(ActionSpace::Continuous), _) => {
                let a = advisor_only_continuous(&out, state.yaw, p);
                let heading = state.yaw + a.yaw_change;
                (
                    a.command(state.yaw),
                    StoredAction::Continuous(a.normalized(p.v_max, p.dpsi_max)),
                    out.continuous.in_recommended(heading, a.speed),
                    out.continuous.is_avoided(heading),
                )
            }
        };

        let rec = ep.step(cmd, goal, |e| if reassign { selector.select(e.tracker(), e.state().position) } else { e.rule_goal() });
        let reward = rec.outcome.reward;
        ret += reward;
        if keep_log {
            log.push(StepLog {
                step: ep.steps(),
                x: rec.next.position.x,
                y: rec.next.position.y,
                yaw: rec.next.yaw,
                speed: rec.cmd.speed,
                battery: rec.next.battery,
                d_min: rec.prev.d_min(),
                goal_x: goal.x,
                goal_y: goal.y,
                regime: out.regime.as_str(),
                component: component.map_or("-", Component::as_str),
                reward,
                terminal: rec.outcome.terminal.as_str(),
            });
        }
        if !frozen {
            agent.env_steps += 1;
            if agent.method.learns() {
                let terminal = rec.outcome.terminal;
                let s_next = encode(&rec.next, rec.next_goal, &scale).to_vec();
                agent.observe(TransitionRecord {
                    s: x.to_vec(),
                    g: goal,
                    a: stored,
                    r: reward,
                    s_next,
                    g_next: rec.next_goal,
                    done: terminal.is_terminal() && terminal != Terminal::Timeout,
                    meta: ReplayMeta { regime: out.regime, d_min: out.features.d_min, in_rec, in_avoid },
                })?;
            }
        }
        goal = rec.next_goal;
    }

    let terminal = ep.terminal();
    let steps = ep.steps();
    Ok(EpisodeSummary { terminal, steps, ret, steps_to_success: (terminal == Terminal::Success).then_some(steps), log })
}

/// Goal the agent would be conditioned on at the start of `inst`.
pub fn initial_goal(inst: &Instance) -> Vec2 {
    match (inst.mission.kind, inst.target_start) {
        (TaskKind::MovingTarget, Some(t)) => t,
        _ => {
            let s = inst.start;
            inst.mission.goals.iter().copied().min_by(|a, b| s.distance(*a).total_cmp(&s.distance(*b))).unwrap_or(s)
        }
    }
}
