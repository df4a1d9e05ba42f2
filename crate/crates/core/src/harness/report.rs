//! Episode tables, aggregation and file emission.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::runner::StepLog;
use crate::error::{Error, Result};
use crate::replay::BufferStats;
use crate::tasks::Terminal;

/// One evaluation episode, as written to `episodes.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub method: String,
    pub regime: String,
    /// `deploy` (no pretraining) or `test` (frozen held-out evaluation).
    pub phase: String,
    pub task: String,
    pub rho: f64,
    pub goals: usize,
    pub v_tar: f64,
    pub seed: u64,
    pub map: usize,
    pub outcome: String,
    pub steps: usize,
    #[serde(rename = "return")]
    pub ret: f64,
    pub steps_to_success: Option<usize>,
}

impl EpisodeRow {
    pub fn terminal(&self) -> Result<Terminal> {
        parse_outcome(&self.outcome)
    }
}

pub fn parse_outcome(s: &str) -> Result<Terminal> {
    [Terminal::Success, Terminal::Collision, Terminal::BatteryDepleted, Terminal::Timeout]
        .into_iter()
        .find(|t| t.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown outcome `{s}`")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub success_ratio: f64,
    pub method: String,
    pub seed: u64,
}

/// Windowed success ratio over a sequence of training outcomes. Early points
/// average over the episodes seen so far.
pub fn success_curve(outcomes: &[Terminal], window: usize, method: &str, seed: u64) -> Vec<CurvePoint> {
    let window = window.max(1);
    let mut hits = 0usize;
    outcomes
        .iter()
        .enumerate()
        .map(|(i, t)| {
            hits += usize::from(*t == Terminal::Success);
            if i >= window {
                hits -= usize::from(outcomes[i - window] == Terminal::Success);
            }
            let n = (i + 1).min(window);
            CurvePoint { episode: i + 1, success_ratio: hits as f64 / n as f64, method: method.to_string(), seed }
        })
        .collect()
}

/// One step of an evaluation episode, as written to `steps.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRow {
    pub seed: u64,
    pub map: usize,
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

impl StepRow {
    pub fn new(seed: u64, map: usize, l: &StepLog) -> Self {
        Self {
            seed,
            map,
            step: l.step,
            x: l.x,
            y: l.y,
            yaw: l.yaw,
            speed: l.speed,
            battery: l.battery,
            d_min: l.d_min,
            goal_x: l.goal_x,
            goal_y: l.goal_y,
            regime: l.regime,
            component: l.component,
            reward: l.reward,
            terminal: l.terminal,
        }
    }
}

/// Mean and population std of per-seed values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt() })
    }
}

#[derive(Clone, Debug, PartialEq, PartialOrd, Eq, Ord, Serialize, Deserialize)]
pub struct ConditionKey {
    pub method: String,
    pub regime: String,
    pub phase: String,
    pub task: String,
    /// Shortest round-trip text of the float, so keys order and compare exactly.
    pub rho: String,
    pub goals: usize,
    pub v_tar: String,
}

impl ConditionKey {
    fn of(r: &EpisodeRow) -> Self {
        Self {
            method: r.method.clone(),
            regime: r.regime.clone(),
            phase: r.phase.clone(),
            task: r.task.clone(),
            rho: r.rho.to_string(),
            goals: r.goals,
            v_tar: r.v_tar.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    #[serde(flatten)]
    pub key: ConditionKey,
    pub episodes: usize,
    pub seeds: usize,
    pub success: f64,
    pub collision: f64,
    pub battery: f64,
    pub timeout: f64,
    /// Spread of the per-seed success rates.
    pub success_std: f64,
    /// Over successful episodes only; absent when nothing succeeded.
    pub steps_to_success: Option<MeanStd>,
    #[serde(rename = "return")]
    pub ret: MeanStd,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub conditions: Vec<ConditionReport>,
}

impl AggregateReport {
    pub fn find(&self, method: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.key.method == method)
    }
}

/// Groups rows by condition and reduces each group. Rates are pooled outcome
/// frequencies; dispersion is across per-seed means.
pub fn aggregate(rows: &[EpisodeRow]) -> Result<AggregateReport> {
    if rows.is_empty() {
        return Err(Error::Config("cannot aggregate an empty episode set".into()));
    }
    let mut groups: BTreeMap<ConditionKey, BTreeMap<u64, Vec<&EpisodeRow>>> = BTreeMap::new();
    for r in rows {
        groups.entry(ConditionKey::of(r)).or_default().entry(r.seed).or_default().push(r);
    }
    let mut conditions = Vec::with_capacity(groups.len());
    for (key, by_seed) in groups {
        let mut counts = [0usize; 4];
        let mut n = 0usize;
        let (mut seed_success, mut seed_steps, mut seed_ret) = (Vec::new(), Vec::new(), Vec::new());
        for eps in by_seed.values() {
            let mut wins = 0usize;
            let mut win_steps = 0usize;
            let mut ret = 0.0;
            for r in eps {
                let slot = match r.terminal()? {
                    Terminal::Success => 0,
                    Terminal::Collision => 1,
                    Terminal::BatteryDepleted => 2,
                    Terminal::Timeout => 3,
                    Terminal::None => unreachable!("parse_outcome rejects `none`"),
                };
                counts[slot] += 1;
                if slot == 0 {
                    wins += 1;
                    win_steps += r.steps_to_success.unwrap_or(r.steps);
                }
                ret += r.ret;
            }
            n += eps.len();
            seed_success.push(wins as f64 / eps.len() as f64);
            seed_ret.push(ret / eps.len() as f64);
            if wins > 0 {
                seed_steps.push(win_steps as f64 / wins as f64);
            }
        }
        let rate = |c: usize| c as f64 / n as f64;
        conditions.push(ConditionReport {
            key,
            episodes: n,
            seeds: by_seed.len(),
            success: rate(counts[0]),
            collision: rate(counts[1]),
            battery: rate(counts[2]),
            timeout: rate(counts[3]),
            success_std: MeanStd::of(&seed_success).map_or(0.0, |m| m.std),
            steps_to_success: MeanStd::of(&seed_steps),
            ret: MeanStd::of(&seed_ret).expect("groups are non-empty"),
        });
    }
    Ok(AggregateReport { conditions })
}

/// Per-seed learner bookkeeping for `metrics.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub env_steps: usize,
    pub updates: usize,
    /// Parameter hash when training ended (pretraining regimes).
    pub trained_hash: Option<String>,
    /// Parameter hash after the frozen test phase; equals `trained_hash`.
    pub tested_hash: Option<String>,
    pub buffer: Option<BufferStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics<'a> {
    pub config: &'a RunConfig,
    pub report: &'a AggregateReport,
    pub seeds: &'a [SeedRecord],
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(e.to_string())
}

/// `episodes.csv` content; the header is written even for an empty table.
pub fn episodes_csv(rows: &[EpisodeRow]) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Ok(b"method,regime,phase,task,rho,goals,v_tar,seed,map,outcome,steps,return,steps_to_success\n".to_vec());
    }
    csv_bytes(rows)
}

pub fn curves_csv(rows: &[CurvePoint]) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Ok(b"episode,success_ratio,method,seed\n".to_vec());
    }
    csv_bytes(rows)
}

pub fn steps_csv(rows: &[StepRow]) -> Result<Vec<u8>> {
    csv_bytes(rows)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("{other:?}")),
    })?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Config(format!("{}: row {}: {e}", path.display(), i + 2))))
        .collect()
}

pub fn read_episodes_csv(path: &Path) -> Result<Vec<EpisodeRow>> {
    let rows: Vec<EpisodeRow> = read_csv(path)?;
    for (i, r) in rows.iter().enumerate() {
        r.terminal().map_err(|e| Error::Config(format!("{}: row {}: {e}", path.display(), i + 2)))?;
    }
    Ok(rows)
}

pub fn read_curves_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    read_csv(path)
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}
