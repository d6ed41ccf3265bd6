//! The run manifest: every invocation writes `run-manifest.json` with all
//! resolved parameters, the seed, and the library version; `--from-manifest`
//! replays it and reproduces the primary outputs byte-identically.

use crate::errors::{CliError, CliResult};
use crate::report::HyperJson;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct EstimateParams {
    pub data: String,
    pub tune: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyper: Option<HyperJson>,
    pub threshold: f64,
    pub center: bool,
}

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct SimulateParams {
    pub model: String,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    pub reps: usize,
    pub sigma2: f64,
    pub threshold: f64,
    pub save_datasets: bool,
}

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct RocParams {
    pub model: String,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    pub sigma2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_point: Option<usize>,
    pub points: usize,
}

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct ForecastParams {
    pub train: String,
    pub test: String,
    pub split: usize,
    pub tune: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyper: Option<HyperJson>,
}

#[derive(Debug, Serialize, Deserialize, Clone)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum ResolvedCommand {
    Estimate(EstimateParams),
    Simulate(SimulateParams),
    Roc(RocParams),
    Forecast(ForecastParams),
}

impl ResolvedCommand {
    pub fn name(&self) -> &'static str {
        match self {
            ResolvedCommand::Estimate(_) => "estimate",
            ResolvedCommand::Simulate(_) => "simulate",
            ResolvedCommand::Roc(_) => "roc",
            ResolvedCommand::Forecast(_) => "forecast",
        }
    }
}

/// Execution context shared by every command.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out: PathBuf,
    pub jobs: usize,
    pub format: OutputFormat,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format '{other}' (expected json|csv)")),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub version: String,
    pub seed: u64,
    pub jobs: usize,
    pub format: String,
    #[serde(flatten)]
    pub resolved: ResolvedCommand,
}

pub fn write_manifest(ctx: &RunContext, resolved: &ResolvedCommand) -> CliResult<()> {
    let manifest = Manifest {
        schema: crate::SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: ctx.seed,
        jobs: ctx.jobs,
        format: ctx.format.name().into(),
        resolved: resolved.clone(),
    };
    crate::report::write_json(&ctx.out.join("run-manifest.json"), &manifest)
}

pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    if manifest.schema != crate::SCHEMA {
        return Err(CliError::usage(format!(
            "{}: unsupported schema '{}'",
            path.display(),
            manifest.schema
        )));
    }
    Ok(manifest)
}
