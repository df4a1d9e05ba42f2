//! The three evaluation regimes.
//!
//! Every run is keyed by `(seed, path)`. Paths start with a phase tag so the
//! training, held-out test and deployment instance streams never overlap, and
//! a method only changes which policy acts: instances, initial weights and
//! target motion are shared by all methods for a given seed.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{EvalRegime, Method, RunConfig};
use super::instance::{generate_instance, Instance, TaskConfig, WorldConfig};
use super::report::{
    aggregate, curves_csv, episodes_csv, json_bytes, steps_csv, success_curve, write_file, AggregateReport, CurvePoint, EpisodeRow,
    Metrics, SeedRecord, StepRow,
};
use super::runner::{run_episode, Agent, EpisodeMode, EpisodeRngs, EpisodeSummary, LearnerCheckpoint, RunContext, TrainingPlan};
use crate::error::{Error, Result};
use crate::rng::{stream, Stream};
use crate::tasks::Terminal;

/// First element of every stream path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Train = 0,
    Test = 1,
    Deploy = 2,
}

const TRAIN: u64 = Phase::Train as u64;
const TEST: u64 = Phase::Test as u64;
const DEPLOY: u64 = Phase::Deploy as u64;

/// World and task for one side of a regime.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub world: WorldConfig,
    pub task: TaskConfig,
}

impl Condition {
    /// Instance `index` of the given phase for `seed`.
    pub fn instance(&self, seed: u64, phase: Phase, index: usize) -> Result<Instance> {
        generate_instance(&self.world, &self.task, &mut stream(seed, &[phase as u64, index as u64], Stream::Instance))
    }
}

/// Training and test conditions implied by the regime.
pub fn conditions(cfg: &RunConfig) -> (Condition, Condition) {
    let base = Condition { world: cfg.world.clone(), task: cfg.task.clone() };
    match cfg.regime {
        EvalRegime::FullShift { train_rho, train_goals, train_v_tar, test_rho, test_goals, test_v_tar, .. } => {
            let shift = |rho, goals, v_tar| {
                let mut c = base.clone();
                c.world.rho = rho;
                c.task.goals = goals;
                c.task.v_tar = v_tar;
                c
            };
            (shift(train_rho, train_goals, train_v_tar), shift(test_rho, test_goals, test_v_tar))
        }
        _ => (base.clone(), base),
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: RunConfig,
    /// Evaluation episodes, ordered by seed then map.
    pub episodes: Vec<EpisodeRow>,
    pub curves: Vec<CurvePoint>,
    pub steps: Vec<StepRow>,
    pub seeds: Vec<SeedRecord>,
    pub checkpoints: Vec<(u64, LearnerCheckpoint)>,
}

impl RunOutput {
    pub fn report(&self) -> Result<AggregateReport> {
        aggregate(&self.episodes)
    }

    /// Writes `episodes.csv`, `curves.csv`, `metrics.json`, one checkpoint
    /// per trained seed and, when step logging is on, `steps.csv`.
    pub fn write(&self, dir: &Path) -> Result<AggregateReport> {
        let report = self.report()?;
        write_file(&dir.join("episodes.csv"), &episodes_csv(&self.episodes)?)?;
        write_file(&dir.join("curves.csv"), &curves_csv(&self.curves)?)?;
        let metrics = Metrics { config: &self.config, report: &report, seeds: &self.seeds };
        write_file(&dir.join("metrics.json"), &json_bytes(&metrics)?)?;
        if self.config.log_steps {
            write_file(&dir.join("steps.csv"), &steps_csv(&self.steps)?)?;
        }
        for (seed, ck) in &self.checkpoints {
            write_file(&checkpoint_path(dir, *seed), &json_bytes(ck)?)?;
        }
        Ok(report)
    }
}

pub fn checkpoint_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join("checkpoints").join(format!("seed-{seed}.json"))
}

/// Reads every `seed-<n>.json` checkpoint under `path`, which may be a run
/// directory, its `checkpoints/` directory or a single checkpoint file.
pub fn load_checkpoints(path: &Path) -> Result<Vec<(u64, LearnerCheckpoint)>> {
    let read = |p: &Path| -> Result<LearnerCheckpoint> { Ok(serde_json::from_slice(&std::fs::read(p)?)?) };
    let seed_of = |p: &Path| -> Option<u64> { p.file_stem()?.to_str()?.strip_prefix("seed-")?.parse().ok() };
    if path.is_file() {
        let seed = seed_of(path).ok_or_else(|| Error::Checkpoint(format!("{}: expected a seed-<n>.json file", path.display())))?;
        return Ok(vec![(seed, read(path)?)]);
    }
    let dir = if path.join("checkpoints").is_dir() { path.join("checkpoints") } else { path.to_path_buf() };
    let mut found = Vec::new();
    for entry in std::fs::read_dir(&dir)? {
        let p = entry?.path();
        if p.extension().is_some_and(|e| e == "json") {
            if let Some(seed) = seed_of(&p) {
                found.push((seed, read(&p)?));
            }
        }
    }
    found.sort_by_key(|(s, _)| *s);
    if found.is_empty() {
        return Err(Error::Checkpoint(format!("no checkpoints under {}", dir.display())));
    }
    Ok(found)
}

fn row(cfg: &RunConfig, phase: &str, cond: &Condition, seed: u64, map: usize, s: &EpisodeSummary) -> EpisodeRow {
    EpisodeRow {
        method: cfg.method.as_str().into(),
        regime: cfg.regime.as_str().into(),
        phase: phase.into(),
        task: cond.task.kind.as_str().into(),
        rho: cond.world.rho,
        goals: cond.task.goals,
        v_tar: cond.task.v_tar,
        seed,
        map,
        outcome: s.terminal.as_str().into(),
        steps: s.steps,
        ret: s.ret,
        steps_to_success: s.steps_to_success,
    }
}

fn step_rows(seed: u64, map: usize, s: &EpisodeSummary) -> impl Iterator<Item = StepRow> + '_ {
    s.log.iter().map(move |l| StepRow::new(seed, map, l))
}

/// Runs the configured regime.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate().map_err(Error::Config)?;
    match cfg.regime {
        EvalRegime::NoPretrain => run_no_pretraining(cfg),
        EvalRegime::LimitedPretrain { .. } => run_limited_pretraining(cfg),
        EvalRegime::FullShift { .. } => run_full_shift(cfg),
    }
}

/// One fresh learner per (seed, map), deployed for a single episode while
/// updating online.
pub fn run_no_pretraining(cfg: &RunConfig) -> Result<RunOutput> {
    let ctx = RunContext::from_config(cfg);
    let cond = Condition { world: cfg.world.clone(), task: cfg.task.clone() };
    let plan = TrainingPlan { online: true, planned_updates: cfg.task.horizon };
    let jobs: Vec<(u64, usize)> = cfg.seeds.iter().flat_map(|&s| (0..cfg.maps).map(move |m| (s, m))).collect();
    let results: Vec<(EpisodeSummary, usize, usize)> = jobs
        .par_iter()
        .map(|&(seed, map)| {
            let inst = cond.instance(seed, Phase::Deploy, map)?;
            let path = [DEPLOY, map as u64];
            let mut agent = Agent::new(cfg.method, cfg, seed, &path, plan);
            let s = run_episode(&mut agent, &inst, &ctx, EpisodeMode::Learn, EpisodeRngs::new(seed, &path), cfg.log_steps)?;
            Ok((s, agent.env_steps(), agent.updates()))
        })
        .collect::<Result<_>>()?;

    let mut out = empty_output(cfg);
    for (&seed, chunk) in cfg.seeds.iter().zip(results.chunks(cfg.maps.max(1))) {
        let mut rec = SeedRecord { seed, env_steps: 0, updates: 0, trained_hash: None, tested_hash: None, buffer: None };
        for (map, (s, env_steps, updates)) in chunk.iter().enumerate() {
            out.episodes.push(row(cfg, "deploy", &cond, seed, map, s));
            out.steps.extend(step_rows(seed, map, s));
            rec.env_steps += env_steps;
            rec.updates += updates;
        }
        out.seeds.push(rec);
    }
    Ok(out)
}

/// Trains for the configured budget on the run's own distribution, then
/// evaluates frozen on held-out instances of the same distribution.
pub fn run_limited_pretraining(cfg: &RunConfig) -> Result<RunOutput> {
    let EvalRegime::LimitedPretrain { episodes } = cfg.regime else {
        return Err(Error::Config("run_limited_pretraining needs regime limited_pretrain".into()));
    };
    train_then_test(cfg, episodes)
}

/// Trains under the training shift settings, then evaluates frozen in the
/// harder test setting.
pub fn run_full_shift(cfg: &RunConfig) -> Result<RunOutput> {
    let EvalRegime::FullShift { episodes, .. } = cfg.regime else {
        return Err(Error::Config("run_full_shift needs regime full_shift".into()));
    };
    train_then_test(cfg, episodes)
}

fn empty_output(cfg: &RunConfig) -> RunOutput {
    RunOutput { config: cfg.clone(), episodes: Vec::new(), curves: Vec::new(), steps: Vec::new(), seeds: Vec::new(), checkpoints: Vec::new() }
}

fn training_plan(episodes: usize, train: &Condition) -> TrainingPlan {
    TrainingPlan { online: false, planned_updates: episodes * train.task.horizon }
}

/// Trains one agent for `episodes` on the training condition and returns it
/// with its per-episode outcomes.
pub fn train_agent(cfg: &RunConfig, seed: u64, episodes: usize) -> Result<(Agent, Vec<Terminal>)> {
    let ctx = RunContext::from_config(cfg);
    let (train, _) = conditions(cfg);
    let mut agent = Agent::new(cfg.method, cfg, seed, &[TRAIN], training_plan(episodes, &train));
    let mut outcomes = Vec::with_capacity(episodes);
    if cfg.method.learns() {
        for e in 0..episodes {
            let inst = train.instance(seed, Phase::Train, e)?;
            let path = [TRAIN, e as u64];
            let s = run_episode(&mut agent, &inst, &ctx, EpisodeMode::Learn, EpisodeRngs::new(seed, &path), false)?;
            outcomes.push(s.terminal);
        }
    }
    Ok((agent, outcomes))
}

/// Frozen evaluation of an already trained agent on the held-out set.
fn test_agent(cfg: &RunConfig, agent: &Agent, seed: u64) -> Result<Vec<EpisodeSummary>> {
    let ctx = RunContext::from_config(cfg);
    let (_, test) = conditions(cfg);
    (0..cfg.test_maps)
        .into_par_iter()
        .map(|i| {
            let inst = test.instance(seed, Phase::Test, i)?;
            // Frozen episodes never touch the agent's learner, so each one
            // gets its own copy and runs independently.
            let mut a = agent.frozen_copy();
            run_episode(&mut a, &inst, &ctx, EpisodeMode::Frozen, EpisodeRngs::new(seed, &[TEST, i as u64]), cfg.log_steps)
        })
        .collect()
}

fn train_then_test(cfg: &RunConfig, episodes: usize) -> Result<RunOutput> {
    let trained: Vec<(Agent, Vec<Terminal>)> =
        cfg.seeds.par_iter().map(|&seed| train_agent(cfg, seed, episodes)).collect::<Result<_>>()?;
    let mut out = empty_output(cfg);
    for (&seed, (agent, outcomes)) in cfg.seeds.iter().zip(trained) {
        out.curves.extend(success_curve(&outcomes, cfg.curve_window, cfg.method.as_str(), seed));
        evaluate_into(&mut out, agent, seed)?;
    }
    Ok(out)
}

fn evaluate_into(out: &mut RunOutput, agent: Agent, seed: u64) -> Result<()> {
    let cfg = out.config.clone();
    let (_, test) = conditions(&cfg);
    let trained_hash = agent.hash();
    let summaries = test_agent(&cfg, &agent, seed)?;
    let tested_hash = agent.hash();
    if trained_hash != tested_hash {
        return Err(Error::Checkpoint("parameters changed during frozen evaluation".into()));
    }
    for (map, s) in summaries.iter().enumerate() {
        out.episodes.push(row(&cfg, "test", &test, seed, map, s));
        out.steps.extend(step_rows(seed, map, s));
    }
    out.seeds.push(SeedRecord {
        seed,
        env_steps: agent.env_steps(),
        updates: agent.updates(),
        trained_hash,
        tested_hash,
        buffer: agent.buffer_stats(),
    });
    if let Some(ck) = agent.checkpoint() {
        out.checkpoints.push((seed, ck));
    }
    Ok(())
}

/// Frozen evaluation from saved checkpoints, one per seed, on the regime's
/// held-out test condition. The advisor-only method needs no checkpoints.
pub fn evaluate(cfg: &RunConfig, checkpoints: &[(u64, LearnerCheckpoint)]) -> Result<RunOutput> {
    cfg.validate().map_err(Error::Config)?;
    let mut out = empty_output(cfg);
    let plan = TrainingPlan { online: false, planned_updates: 0 };
    if cfg.method == Method::AdvisorOnly {
        for &seed in &cfg.seeds {
            evaluate_into(&mut out, Agent::new(cfg.method, cfg, seed, &[TRAIN], plan), seed)?;
        }
        return Ok(out);
    }
    if checkpoints.is_empty() {
        return Err(Error::Checkpoint("no checkpoints given".into()));
    }
    for (seed, ck) in checkpoints {
        let mut agent = Agent::new(ck.method, cfg, *seed, &[TRAIN], plan);
        agent.restore(ck)?;
        out.config.method = ck.method;
        evaluate_into(&mut out, agent, *seed)?;
    }
    out.config.seeds = checkpoints.iter().map(|(s, _)| *s).collect();
    Ok(out)
}
