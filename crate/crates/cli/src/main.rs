mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rulecoach::harness::{
    aggregate, evaluate, json_bytes, load_checkpoints, read_curves_csv, read_episodes_csv, run, write_file, Condition, EpisodeRow,
    Phase, RunConfig, RunOutput,
};

/// Advisor-guided UAV navigation experiments.
#[derive(Parser, Debug)]
#[command(name = "rulecoach", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Run-config JSON; omitted means all defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted-key override, e.g. `--set world.rho=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_kv)]
    overrides: Vec<(String, String)>,
    /// Output directory; falls back to RULECOACH_OUT, then the config's `output`.
    #[arg(long, env = "RULECOACH_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate instances and write them as JSON files.
    GenMaps {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Run the configured regime and write its results.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Evaluate saved checkpoints frozen on the regime's test condition.
    Eval {
        /// A run directory, its checkpoints/ directory or one seed-<n>.json file.
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Aggregate one or more episodes.csv files into a single report.
    Report {
        /// Run directories or episodes.csv files.
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw training curves and outcome bars as SVG.
    Plot {
        /// Run directories, curves.csv or episodes.csv files.
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    if k.is_empty() {
        return Err(format!("empty key in `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p, &self.overrides).with_context(|| format!("loading {}", p.display()))?,
            None => RunConfig::from_json_with("", &self.overrides)?,
        };
        if let Some(out) = &self.out {
            cfg.output = out.clone();
        }
        Ok(cfg)
    }
}

fn emit(out: &RunOutput) -> Result<()> {
    let dir = &out.config.output;
    let report = out.write(dir).with_context(|| format!("writing results to {}", dir.display()))?;
    for c in &report.conditions {
        println!(
            "{} {} {} rho={} success={:.3} collision={:.3} battery={:.3} timeout={:.3} episodes={}",
            c.key.method, c.key.regime, c.key.phase, c.key.rho, c.success, c.collision, c.battery, c.timeout, c.episodes
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

/// Resolves a directory argument to the named file inside it.
fn input_file(p: &Path, name: &str) -> PathBuf {
    if p.is_dir() {
        p.join(name)
    } else {
        p.to_path_buf()
    }
}

fn read_episodes(inputs: &[PathBuf]) -> Result<Vec<EpisodeRow>> {
    let mut rows = Vec::new();
    for p in inputs {
        let f = input_file(p, "episodes.csv");
        rows.extend(read_episodes_csv(&f).with_context(|| format!("reading {}", f.display()))?);
    }
    Ok(rows)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenMaps { rho, count, seed, cfg } => {
            let mut c = cfg.load()?;
            c.world.rho = rho;
            c.validate().map_err(rulecoach::Error::Config)?;
            let cond = Condition { world: c.world.clone(), task: c.task.clone() };
            for i in 0..count {
                let inst = cond.instance(seed, Phase::Deploy, i)?;
                let path = c.output.join(format!("map-{i:04}.json"));
                write_file(&path, &json_bytes(&inst.to_file())?)?;
            }
            println!("wrote {count} instances to {}", c.output.display());
        }
        Command::Run { cfg } => emit(&run(&cfg.load()?)?)?,
        Command::Eval { checkpoint, cfg } => {
            let c = cfg.load()?;
            let cks = load_checkpoints(&checkpoint)?;
            emit(&evaluate(&c, &cks)?)?;
        }
        Command::Report { inputs, out } => {
            let rows = read_episodes(&inputs)?;
            if rows.is_empty() {
                bail!("no episodes in the given inputs");
            }
            let report = aggregate(&rows)?;
            write_file(&out.join("report.json"), &json_bytes(&report)?)?;
            println!("{} conditions, {} episodes; wrote {}", report.conditions.len(), rows.len(), out.join("report.json").display());
        }
        Command::Plot { inputs, out } => {
            let mut written = Vec::new();
            let mut curves = Vec::new();
            let mut episodes = Vec::new();
            for p in &inputs {
                let is = |name: &str| p.is_dir() || p.file_name().is_some_and(|f| f == name);
                let cf = input_file(p, "curves.csv");
                if is("curves.csv") && cf.exists() {
                    curves.extend(read_curves_csv(&cf).with_context(|| format!("reading {}", cf.display()))?);
                }
                let ef = input_file(p, "episodes.csv");
                if is("episodes.csv") && ef.exists() {
                    episodes.extend(read_episodes_csv(&ef).with_context(|| format!("reading {}", ef.display()))?);
                }
            }
            if !curves.is_empty() {
                let svg = plot::curves_svg(&curves);
                write_file(&out.join("curves.svg"), svg.as_bytes())?;
                written.push("curves.svg");
            }
            if !episodes.is_empty() {
                let svg = plot::outcomes_svg(&aggregate(&episodes)?);
                write_file(&out.join("outcomes.svg"), svg.as_bytes())?;
                written.push("outcomes.svg");
            }
            if written.is_empty() {
                bail!("nothing to plot: inputs hold no curve or episode rows");
            }
            println!("wrote {} to {}", written.join(", "), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
