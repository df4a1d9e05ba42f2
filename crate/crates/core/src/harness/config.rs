use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::instance::{TaskConfig, WorldConfig};
use crate::advisor::AdvisorParams;
use crate::error::{Error, Result};
use crate::learners::LearnerConfig;
use crate::replay::{PriorityParams, ReplayMode};
use crate::tasks::{RewardParams, TaskKind};
use crate::world::EnergyModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dqn,
    Hdqn,
    Sac,
    Hsac,
    AdvisorOnly,
    HsacNoMaer,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpace {
    Discrete,
    #[default]
    Continuous,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Dqn, Method::Hdqn, Method::Sac, Method::Hsac, Method::AdvisorOnly, Method::HsacNoMaer];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dqn => "dqn",
            Method::Hdqn => "hdqn",
            Method::Sac => "sac",
            Method::Hsac => "hsac",
            Method::AdvisorOnly => "advisor_only",
            Method::HsacNoMaer => "hsac_no_maer",
        }
    }

    /// Whether the advisor shapes behavior (goal reassignment and arbitration).
    pub fn advised(self) -> bool {
        !matches!(self, Method::Dqn | Method::Sac)
    }

    pub fn learns(self) -> bool {
        self != Method::AdvisorOnly
    }

    pub fn replay_mode(self) -> ReplayMode {
        match self {
            Method::Hdqn | Method::Hsac => ReplayMode::ModeAware,
            _ => ReplayMode::Uniform,
        }
    }

    /// Action space; the advisor-only policy uses `advisor_only`.
    pub fn action_space(self, advisor_only: ActionSpace) -> ActionSpace {
        match self {
            Method::Dqn | Method::Hdqn => ActionSpace::Discrete,
            Method::Sac | Method::Hsac | Method::HsacNoMaer => ActionSpace::Continuous,
            Method::AdvisorOnly => advisor_only,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Evaluation protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EvalRegime {
    /// Fresh learner per instance, one episode with online updates.
    NoPretrain,
    /// Train for a budget of episodes, freeze, evaluate on held-out instances.
    LimitedPretrain { episodes: usize },
    /// Train on the base distribution, freeze, evaluate on a harder one.
    FullShift {
        #[serde(default = "FullShift::episodes")]
        episodes: usize,
        #[serde(default = "FullShift::train_rho")]
        train_rho: f64,
        #[serde(default = "FullShift::train_goals")]
        train_goals: usize,
        #[serde(default = "FullShift::train_v_tar")]
        train_v_tar: f64,
        #[serde(default = "FullShift::test_rho")]
        test_rho: f64,
        #[serde(default = "FullShift::test_goals")]
        test_goals: usize,
        #[serde(default = "FullShift::test_v_tar")]
        test_v_tar: f64,
    },
}

struct FullShift;

impl FullShift {
    fn episodes() -> usize {
        5000
    }
    fn train_rho() -> f64 {
        0.20
    }
    fn train_goals() -> usize {
        2
    }
    fn train_v_tar() -> f64 {
        2.0
    }
    fn test_rho() -> f64 {
        0.30
    }
    fn test_goals() -> usize {
        3
    }
    fn test_v_tar() -> f64 {
        3.0
    }
}

impl EvalRegime {
    pub fn full_shift() -> Self {
        EvalRegime::FullShift {
            episodes: FullShift::episodes(),
            train_rho: FullShift::train_rho(),
            train_goals: FullShift::train_goals(),
            train_v_tar: FullShift::train_v_tar(),
            test_rho: FullShift::test_rho(),
            test_goals: FullShift::test_goals(),
            test_v_tar: FullShift::test_v_tar(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EvalRegime::NoPretrain => "no_pretrain",
            EvalRegime::LimitedPretrain { .. } => "limited_pretrain",
            EvalRegime::FullShift { .. } => "full_shift",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub task: TaskConfig,
    pub world: WorldConfig,
    pub regime: EvalRegime,
    pub seeds: Vec<u64>,
    /// Deployment instances per seed (no-pretraining regime).
    pub maps: usize,
    /// Held-out evaluation instances per seed (pretraining regimes).
    pub test_maps: usize,
    pub output: PathBuf,
    pub advisor: AdvisorParams,
    pub reward: RewardParams,
    pub energy: EnergyModel,
    pub learner: LearnerConfig,
    pub replay: PriorityParams,
    pub advisor_only_actions: ActionSpace,
    /// Episodes per window in the training success curve.
    pub curve_window: usize,
    /// Keep per-step logs and write `steps.csv`.
    pub log_steps: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Hsac,
            task: TaskConfig::default(),
            world: WorldConfig::default(),
            regime: EvalRegime::NoPretrain,
            seeds: vec![0, 1, 2, 3, 4],
            maps: 50,
            test_maps: 200,
            output: PathBuf::from("runs"),
            advisor: AdvisorParams::default(),
            reward: RewardParams::default(),
            energy: EnergyModel::default(),
            learner: LearnerConfig::default(),
            replay: PriorityParams::default(),
            advisor_only_actions: ActionSpace::Continuous,
            curve_window: 50,
            log_steps: false,
        }
    }
}

/// Parses a scalar override: JSON if it parses, else a bare string.
fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Sets `key` (dot-separated) in a JSON object tree. Missing intermediate
/// objects are created; validation against the schema happens on decode.
pub fn apply_override(root: &mut Value, key: &str, raw: &str) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed override key `{key}`")));
    }
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), parse_value(raw));
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("override key has at least one part")
}

impl RunConfig {
    /// Decodes a config from JSON text after applying `key=value` overrides,
    /// then validates it.
    pub fn from_json_with(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut v: Value = if text.trim().is_empty() { Value::Object(Default::default()) } else { serde_json::from_str(text)? };
        if !v.is_object() {
            return Err(Error::Config("config root must be a JSON object".into()));
        }
        // Replacing the regime kind should not inherit stale variant fields.
        for (k, raw) in overrides {
            if k == "regime.kind" {
                v["regime"] = Value::Object(Default::default());
            }
            apply_override(&mut v, k, raw)?;
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                Error::Config(e.into_inner().to_string())
            } else {
                Error::Config(format!("{path}: {}", e.into_inner()))
            }
        })?;
        cfg.validate().map_err(Error::Config)?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_with(&text, overrides)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        self.advisor.validate()?;
        self.learner.validate()?;
        let w = &self.world;
        if w.width == 0 || w.height == 0 {
            return Err("world.width and world.height must be positive".into());
        }
        if !(0.0..1.0).contains(&w.rho) {
            return Err(format!("world.rho must lie in [0, 1), got {}", w.rho));
        }
        if w.min_separation < 0.0 {
            return Err("world.min_separation must be non-negative".into());
        }
        let t = &self.task;
        if t.kind == TaskKind::MultiGoal && t.goals == 0 {
            return Err("task.goals must be at least 1 for multi_goal".into());
        }
        if t.d_cap <= 0.0 {
            return Err("task.d_cap must be positive".into());
        }
        if t.v_tar < 0.0 {
            return Err("task.v_tar must be non-negative".into());
        }
        if t.horizon == 0 {
            return Err("task.horizon must be positive".into());
        }
        if self.seeds.is_empty() {
            return Err("seeds must not be empty".into());
        }
        if self.curve_window == 0 {
            return Err("curve_window must be positive".into());
        }
        let r = &self.replay;
        if !(r.alpha >= 0.0 && r.eps > 0.0 && r.w_risk_max >= 1.0) {
            return Err("replay requires alpha >= 0, eps > 0 and w_risk_max >= 1".into());
        }
        if !(0.0..=1.0).contains(&r.beta_start) || !(0.0..=1.0).contains(&r.beta_end) {
            return Err("replay.beta_start and replay.beta_end must lie in [0, 1]".into());
        }
        match self.regime {
            EvalRegime::NoPretrain if self.maps == 0 => Err("maps must be positive".into()),
            EvalRegime::LimitedPretrain { episodes } if episodes == 0 || self.test_maps == 0 => {
                Err("limited_pretrain needs positive episodes and test_maps".into())
            }
            EvalRegime::FullShift { episodes, train_rho, test_rho, train_goals, test_goals, .. } => {
                if episodes == 0 || self.test_maps == 0 {
                    return Err("full_shift needs positive episodes and test_maps".into());
                }
                if !(0.0..1.0).contains(&train_rho) || !(0.0..1.0).contains(&test_rho) {
                    return Err("full_shift densities must lie in [0, 1)".into());
                }
                if train_goals == 0 || test_goals == 0 {
                    return Err("full_shift goal counts must be positive".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(k: &str, v: &str) -> (String, String) {
        (k.to_string(), v.to_string())
    }

    #[test]
    fn empty_config_is_all_defaults() {
        let c = RunConfig::from_json_with("{}", &[]).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.advisor, AdvisorParams::default());
        assert_eq!(RunConfig::from_json_with("", &[]).unwrap(), c);
    }

    #[test]
    fn round_trip_is_fixed_point() {
        let c = RunConfig::from_json_with("{}", &[ov("regime.kind", "limited_pretrain"), ov("regime.episodes", "300")]).unwrap();
        let again = RunConfig::from_json_with(&c.to_json(), &[]).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_json(), c.to_json());
        let fs = RunConfig { regime: EvalRegime::full_shift(), ..Default::default() };
        assert_eq!(RunConfig::from_json_with(&fs.to_json(), &[]).unwrap(), fs);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::from_json_with(r#"{"wrld": {}}"#, &[]).unwrap_err().to_string();
        assert!(e.contains("wrld"), "{e}");
        let e = RunConfig::from_json_with("{}", &[ov("advisor.r_stpo", "1.0")]).unwrap_err().to_string();
        assert!(e.contains("r_stpo"), "{e}");
    }

    #[test]
    fn overrides_propagate() {
        let c = RunConfig::from_json_with("{}", &[ov("world.rho", "0.3"), ov("method", "sac"), ov("task.kind", "multi_goal")]).unwrap();
        assert_eq!(c.world.rho, 0.3);
        assert_eq!(c.method, Method::Sac);
        assert_eq!(c.task.kind, TaskKind::MultiGoal);
    }

    #[test]
    fn weight_simplex_violation_rejected() {
        let e = RunConfig::from_json_with("{}", &[ov("advisor.weights.nominal", "[0.5, 0.4, 0.2]")]).unwrap_err();
        assert!(e.to_string().contains("sum"), "{e}");
    }

    #[test]
    fn speed_ordering_violation_names_constraint() {
        let e = RunConfig::from_json_with("{}", &[ov("advisor.v_avoid", "4.5")]).unwrap_err().to_string();
        assert!(e.contains("v_avoid") && e.contains("v_clear"), "{e}");
    }

    #[test]
    fn method_flags() {
        assert!(Method::Hsac.advised() && Method::HsacNoMaer.advised() && !Method::Sac.advised());
        assert_eq!(Method::HsacNoMaer.replay_mode(), ReplayMode::Uniform);
        assert_eq!(Method::Hdqn.replay_mode(), ReplayMode::ModeAware);
        assert_eq!(Method::Dqn.replay_mode(), ReplayMode::Uniform);
        assert!(!Method::AdvisorOnly.learns());
        assert_eq!("hsac_no_maer".parse::<Method>().unwrap(), Method::HsacNoMaer);
    }
}
