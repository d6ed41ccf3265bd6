//! Flag parsing, parameter resolution, and dispatch.

use crate::config::Config;
use crate::errors::{CliError, CliResult};
use crate::manifest::{
    read_manifest, EstimateParams, ForecastParams, OutputFormat, ResolvedCommand, RocParams,
    RunContext, SimulateParams,
};
use crate::report::HyperJson;
use bagus_core::{ConstraintMode, Hyperparameters, Model};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(
    name = "bagus",
    version,
    about = "Sparse precision-matrix estimation with a spike-and-slab Lasso prior",
    after_help = "Parameter precedence: flags > config file > BAGUS_SEED (seed only) > defaults.\n\
                  Every run writes run-manifest.json under --out; replay it with --from-manifest."
)]
pub struct Cli {
    /// Defaults file with `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Replay a recorded run (outputs are byte-identical)
    #[arg(long, value_name = "MANIFEST", conflicts_with = "command")]
    pub from_manifest: Option<PathBuf>,

    /// Output directory for all artifacts
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads across replications and grid points (never within a fit)
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// PRNG seed for data generation
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Format of summary reports (json always written; csv adds tables)
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate a sparse precision matrix and its edge set from a data file
    Estimate(EstimateArgs),
    /// Replicated synthetic benchmark with BIC tuning per replication
    Simulate(SimulateArgs),
    /// ROC curve of edge recovery as the inclusion threshold sweeps
    Roc(RocArgs),
    /// Fit on training data and forecast the trailing block of each test row
    Forecast(ForecastArgs),
}

#[derive(Args, Debug)]
pub struct HyperFlags {
    /// Tune (v0, v1) on the 16-point BIC grid instead of fixing them
    #[arg(long)]
    pub tune: bool,
    /// Spike scale
    #[arg(long)]
    pub v0: Option<f64>,
    /// Slab scale (> v0)
    #[arg(long)]
    pub v1: Option<f64>,
    /// Prior slab weight in (0, 1) [default 0.5]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Diagonal exponential rate [default v0]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Spectral-norm cap [default 0.99 * sqrt(2 n v0)]
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub inner_tol: Option<f64>,
    #[arg(long)]
    pub outer_tol: Option<f64>,
    #[arg(long)]
    pub max_inner: Option<usize>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Norm-cap enforcement: spectral | maxelem
    #[arg(long)]
    pub constraint: Option<String>,
}

impl HyperFlags {
    /// Resolves to `None` when tuning, `Some(h)` for an explicit point.
    fn resolve(&self, cfg: &Config, n: usize) -> CliResult<Option<HyperJson>> {
        let tune = self.tune || cfg.get::<bool>("tune")?.unwrap_or(false);
        if tune {
            return Ok(None);
        }
        let v0 = self
            .v0
            .map(Ok)
            .or_else(|| cfg.get::<f64>("v0").transpose())
            .transpose()?
            .ok_or_else(|| CliError::usage("either --tune or both --v0 and --v1 are required"))?;
        let v1 = self
            .v1
            .map(Ok)
            .or_else(|| cfg.get::<f64>("v1").transpose())
            .transpose()?
            .ok_or_else(|| CliError::usage("either --tune or both --v0 and --v1 are required"))?;
        let mut h = Hyperparameters::new(v0, v1, n);
        h.eta = cfg.resolve(self.eta, "eta", h.eta)?;
        h.tau = cfg.resolve(self.tau, "tau", h.tau)?;
        h.b = cfg.resolve(self.b, "b", h.b)?;
        h.inner_tol = cfg.resolve(self.inner_tol, "inner_tol", h.inner_tol)?;
        h.outer_tol = cfg.resolve(self.outer_tol, "outer_tol", h.outer_tol)?;
        h.max_inner = cfg.resolve(self.max_inner, "max_inner", h.max_inner)?;
        h.max_outer = cfg.resolve(self.max_outer, "max_outer", h.max_outer)?;
        let mode = cfg.resolve(self.constraint.clone(), "constraint", "spectral".into())?;
        h.constraint = match mode.as_str() {
            "spectral" => ConstraintMode::Spectral,
            "maxelem" => ConstraintMode::MaxElem,
            other => {
                return Err(CliError::usage(format!(
                    "unknown constraint mode '{other}' (expected spectral|maxelem)"
                )))
            }
        };
        h.validate().map_err(CliError::from)?;
        Ok(Some(HyperJson::from(&h)))
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Input observations: bagus-dataset CSV or plain headerless numeric CSV
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Edge threshold on inclusion probabilities, in (0, 1)
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Column centering: auto (header => off, plain => on), yes, or no
    #[arg(long)]
    pub center: Option<String>,
    #[command(flatten)]
    pub hyper: HyperFlags,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Ground-truth model: star | ar2 | circle | random
    #[arg(long)]
    pub model: Option<String>,
    /// Dimension
    #[arg(long)]
    pub p: Option<usize>,
    /// Observations per replication
    #[arg(long)]
    pub n: Option<usize>,
    /// Replications
    #[arg(long)]
    pub reps: Option<usize>,
    /// Scale for the random-graph model
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Edge threshold for the selection metrics
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Write each replication's dataset (and truth) under --out
    #[arg(long)]
    pub save_datasets: bool,
}

#[derive(Args, Debug)]
pub struct RocArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Fit only this grid index; default sweeps all 16 and reports the best
    #[arg(long)]
    pub grid_point: Option<usize>,
    /// Interior points kept on the written curve
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ForecastArgs {
    /// Training observations (plain numeric CSV or bagus-dataset)
    #[arg(long, value_name = "FILE")]
    pub train: PathBuf,
    /// Held-out observations with the same columns
    #[arg(long, value_name = "FILE")]
    pub test: PathBuf,
    /// Observed leading coordinates per test row, 1 <= split < p
    #[arg(long)]
    pub split: Option<usize>,
    #[command(flatten)]
    pub hyper: HyperFlags,
}

/// Entry point: returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let out = cli
        .out
        .map(Ok)
        .or_else(|| cfg.get::<PathBuf>("out").transpose())
        .transpose()?
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let ctx = RunContext {
        out,
        jobs: cfg.resolve(cli.jobs, "jobs", 1)?.max(1),
        format: cli
            .format
            .map(Ok)
            .or_else(|| cfg.get::<OutputFormat>("format").transpose())
            .transpose()?
            .unwrap_or(OutputFormat::Json),
        seed: cfg.resolve_seed(cli.seed)?,
    };

    let resolved = match (&cli.from_manifest, cli.command) {
        (Some(path), _) => read_manifest(path)?.resolved,
        (None, Some(command)) => resolve_command(command, &cfg, &ctx)?,
        (None, None) => {
            return Err(CliError::usage(
                "a subcommand or --from-manifest is required (see --help)",
            ))
        }
    };

    crate::commands::execute(&resolved, &ctx)
}

fn parse_model(raw: &str) -> CliResult<Model> {
    Model::from_str(raw).map_err(CliError::from)
}

fn resolve_threshold(flag: Option<f64>, cfg: &Config) -> CliResult<f64> {
    let t = cfg.resolve(flag, "threshold", 0.5)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(CliError::usage("threshold must lie in (0, 1)"));
    }
    Ok(t)
}

fn resolve_command(command: Command, cfg: &Config, ctx: &RunContext) -> CliResult<ResolvedCommand> {
    Ok(match command {
        Command::Estimate(args) => {
            let loaded = crate::io::read_dataset(&args.data)?;
            let center = match cfg
                .resolve(args.center.clone(), "center", "auto".into())?
                .as_str()
            {
                "auto" => !loaded.had_header,
                "yes" | "true" | "on" => true,
                "no" | "false" | "off" => false,
                other => {
                    return Err(CliError::usage(format!(
                        "unknown center mode '{other}' (expected auto|yes|no)"
                    )))
                }
            };
            let hyper = args.hyper.resolve(cfg, loaded.data.n)?;
            ResolvedCommand::Estimate(EstimateParams {
                data: args.data.to_string_lossy().into_owned(),
                tune: hyper.is_none(),
                hyper,
                threshold: resolve_threshold(args.threshold, cfg)?,
                center,
            })
        }
        Command::Simulate(args) => {
            let model = parse_model(&cfg.resolve(args.model, "model", "star".into())?)?;
            ResolvedCommand::Simulate(SimulateParams {
                model: model.name().into(),
                p: cfg.resolve(args.p, "p", 50)?,
                n: cfg.resolve(args.n, "n", 100)?,
                seed: ctx.seed,
                reps: cfg.resolve(args.reps, "reps", 1)?,
                sigma2: cfg.resolve(args.sigma2, "sigma2", 3.0)?,
                threshold: resolve_threshold(args.threshold, cfg)?,
                save_datasets: args.save_datasets
                    || cfg.get::<bool>("save_datasets")?.unwrap_or(false),
            })
        }
        Command::Roc(args) => {
            let model = parse_model(&cfg.resolve(args.model, "model", "star".into())?)?;
            ResolvedCommand::Roc(RocParams {
                model: model.name().into(),
                p: cfg.resolve(args.p, "p", 50)?,
                n: cfg.resolve(args.n, "n", 100)?,
                seed: ctx.seed,
                sigma2: cfg.resolve(args.sigma2, "sigma2", 3.0)?,
                grid_point: args
                    .grid_point
                    .map(Ok)
                    .or_else(|| cfg.get::<usize>("grid_point").transpose())
                    .transpose()?,
                points: cfg.resolve(args.points, "points", 200)?,
            })
        }
        Command::Forecast(args) => {
            let train = crate::io::read_dataset(&args.train)?;
            let split = args
                .split
                .map(Ok)
                .or_else(|| cfg.get::<usize>("split").transpose())
                .transpose()?
                .ok_or_else(|| CliError::usage("--split is required"))?;
            let hyper = args.hyper.resolve(cfg, train.data.n)?;
            ResolvedCommand::Forecast(ForecastParams {
                train: args.train.to_string_lossy().into_owned(),
                test: args.test.to_string_lossy().into_owned(),
                split,
                tune: hyper.is_none(),
                hyper,
            })
        }
    })
}
