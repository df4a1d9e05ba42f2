mod config;
mod instance;
mod regimes;
mod report;
mod runner;

pub use config::{apply_override, ActionSpace, EvalRegime, Method, RunConfig};
pub use instance::{generate_instance, Feasibility, Instance, InstanceFile, TaskConfig, WorldConfig};
pub use runner::{
    initial_goal, run_episode, Agent, EpisodeMode, EpisodeRngs, EpisodeSummary, LearnerCheckpoint, Policy, RunContext, StepLog,
    TrainingPlan,
};
pub use regimes::{
    checkpoint_path, conditions, evaluate, load_checkpoints, run, run_full_shift, run_limited_pretraining, run_no_pretraining, train_agent, Condition, Phase, RunOutput,
};
pub use report::{
    aggregate, curves_csv, episodes_csv, json_bytes, parse_outcome, read_curves_csv, read_episodes_csv, steps_csv, success_curve,
    write_file, AggregateReport, ConditionKey, ConditionReport, CurvePoint, EpisodeRow, MeanStd, Metrics, SeedRecord, StepRow,
};
