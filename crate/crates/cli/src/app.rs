//! Subcommand orchestration and exit-code mapping.

use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::heatmap::write_jsi;
use crate::pipeline::{self, Design, PipelineError, SweepKey};
use crate::report::{self, Metrics, RunManifest, WriteError};
use crate::units::parse_quantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Design,
    Jsa,
    Sweep,
    Raman,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Design => "design",
            Self::Jsa => "jsa",
            Self::Sweep => "sweep",
            Self::Raman => "raman",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    /// Worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
    pub vary: Option<String>,
    pub frozen_factors: bool,
}

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] PipelineError),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error("thread pool: {0}")]
    Threads(String),
}

impl AppError {
    /// 2 for anything the user can fix in the inputs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) => 2,
            Self::Numerical(_) | Self::Write(_) | Self::Threads(_) => 1,
        }
    }
}

/// Paths written by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

/// Parses `key=v1,v2,...` for the sweep subcommand.
pub fn parse_vary(spec: &str) -> Result<(SweepKey, Vec<f64>), AppError> {
    let (name, list) = spec
        .split_once('=')
        .ok_or_else(|| AppError::Usage(format!("--vary expects key=v1,v2,..., got `{spec}`")))?;
    let key = SweepKey::parse(name.trim()).ok_or_else(|| {
        AppError::Usage(format!(
            "unknown sweep key `{}`; expected one of {}",
            name.trim(),
            SweepKey::NAMES.join(", ")
        ))
    })?;
    let values = list
        .split(',')
        .map(|v| {
            let v = v.trim();
            let parsed = match key.dimension() {
                Some(dim) => parse_quantity(v, dim).map_err(|e| e.to_string()),
                None => v.parse::<f64>().map_err(|e| format!("`{v}`: {e}")),
            };
            match parsed {
                Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                Ok(x) => Err(AppError::Usage(format!(
                    "--vary {}: value {x} must be positive",
                    key.name()
                ))),
                Err(e) => Err(AppError::Usage(format!("--vary {}: {e}", key.name()))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((key, values))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn load_config(opts: &Options) -> Result<Config, AppError> {
    let mut cfg = match &opts.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if opts.frozen_factors {
        cfg.grid.frozen_factors = true;
    }
    Ok(cfg)
}

/// Runs one subcommand inside a pool of the requested size.
pub fn run(opts: &Options) -> Result<RunOutputs, AppError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        if n == 0 {
            return Err(AppError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| AppError::Threads(e.to_string()))?;
    pool.install(|| run_in_pool(opts, pool.current_num_threads()))
}

fn run_in_pool(opts: &Options, threads: usize) -> Result<RunOutputs, AppError> {
    let started = now();
    let cfg = load_config(opts)?;
    let sweep = match (opts.command, &opts.vary) {
        (Command::Sweep, Some(spec)) => Some(parse_vary(spec)?),
        (Command::Sweep, None) => return Err(AppError::Usage("sweep needs --vary key=v1,v2,...".into())),
        (_, Some(_)) => return Err(AppError::Usage("--vary only applies to sweep".into())),
        (_, None) => None,
    };
    let dir = opts.out.as_path();
    report::ensure_dir(dir)?;

    let design = pipeline::design(&cfg)?;
    let mut files = vec!["design.json".to_string()];
    report::write_json(&dir.join("design.json"), &design.report())?;

    match opts.command {
        Command::Design => {
            report::write_mode_curves_csv(&dir.join("neff.csv"), &pipeline::mode_curves(&cfg, &design)?)?;
            files.push("neff.csv".into());
        }
        Command::Jsa => files.extend(jsa_outputs(&cfg, &design, dir)?),
        Command::Sweep => {
            let (key, values) = sweep.expect("checked above");
            let rows = pipeline::run_sweep(&cfg, &design, key, &values)?;
            report::write_sweep_csv(&dir.join("sweep.csv"), &rows)?;
            files.push("sweep.csv".into());
        }
        Command::Raman => {
            let run = pipeline::run_raman(&cfg, &design)?;
            report::write_noise_csv(&dir.join("noise_sweep.csv"), &run.rows)?;
            report::write_json(&dir.join("noise_summary.json"), &run.summary)?;
            files.extend(["noise_sweep.csv".into(), "noise_summary.json".into()]);
        }
    }

    files.push("manifest.json".into());
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: opts.command.name().to_string(),
        config_hash: report::config_hash(&cfg),
        config_path: opts.config.as_ref().map(|p| p.display().to_string()),
        threads,
        started_utc: started,
        finished_utc: now(),
        outputs: files.clone(),
    };
    report::write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(RunOutputs {
        dir: dir.to_path_buf(),
        files,
    })
}

const JSA_CSV_CELLS: usize = 512;
const JSI_PIXELS: usize = 1024;

fn jsa_outputs(cfg: &Config, design: &Design, dir: &Path) -> Result<Vec<String>, AppError> {
    let run = pipeline::run_jsa(cfg, design)?;
    let grid = &run.outcome.grid;
    let stride = grid.cells().div_ceil(JSA_CSV_CELLS);
    report::write_jsa_csv(&dir.join("jsa.csv"), grid, stride)?;
    let metrics = Metrics::new(
        &run,
        design.fiber.diameter(),
        design.omega_seed,
        cfg.grid.frozen_factors,
    );
    report::write_json(&dir.join("metrics.json"), &metrics)?;
    write_jsi(&dir.join("jsi.png"), grid, JSI_PIXELS)?;
    Ok(vec!["jsa.csv".into(), "metrics.json".into(), "jsi.png".into()])
}
