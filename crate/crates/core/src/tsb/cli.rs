//! `dispatch` subcommands. Every command prints JSON on stdout; failures are
//! reported as `{"error": {"code", "message"}}` on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{router, spawn_replay, App, Session, SessionHandle};
use crate::data::{compare, compute_kpis, generate_dataset, Dataset, GeneratorSpec, KpiReport, SCHEMA_VERSION};
use crate::routing::{validate_solution, VrptwTask};
use crate::sim::{attempts_within_budget, calibrate, run, write_jsonl, Mode, RunConfig, RunStats};
use crate::solver::{solve, solve_exact, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "dispatch", version, about = "Restaurant delivery dispatch: simulate, calibrate, generate, solve, compare, serve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Baseline,
    Optimized,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a dataset and write a KPI report.
    Simulate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 120)]
        delta_seconds: i64,
        #[arg(long, default_value_t = 50)]
        solver_timeout_ms: u64,
        #[arg(long, default_value_t = 1000)]
        loop_budget_ms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Travel-time factor; calibrated from the dataset when omitted.
        #[arg(long)]
        factor: Option<f64>,
        /// Enforce the wall-clock budgets instead of count-based caps.
        /// Results then depend on machine speed.
        #[arg(long)]
        realtime: bool,
        #[arg(long)]
        out: PathBuf,
        /// Run log, one JSON event per line.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Per-episode wall times.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Fit the travel-time factor to the historical legs.
    Calibrate {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Write a synthetic dataset.
    Generate {
        /// Generator spec JSON; missing fields take defaults.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one VRPTW task.
    Solve {
        #[arg(long)]
        task: PathBuf,
        #[arg(long = "timeout-ms", alias = "time-budget-ms", default_value_t = 50)]
        time_budget_ms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exhaustive search (small tasks only).
        #[arg(long)]
        exact: bool,
    },
    /// Ratio table of an optimized run against a baseline run.
    Compare {
        #[arg(long)]
        optimized: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-day P10D series.
        #[arg(long)]
        daily: Option<PathBuf>,
    },
    /// Serve the HTTP API over a dataset replayed in accelerated time.
    Serve {
        #[arg(long)]
        dataset: PathBuf,
        /// Simulated seconds per real second.
        #[arg(long, default_value_t = 60.0)]
        replay_speed: f64,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "r1")]
        restaurant_id: String,
        #[arg(long)]
        factor: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl ToString) -> Self {
        CliError {
            code,
            message: message.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

/// Output of `simulate`, input of `compare`. Holds no wall-clock data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: Mode,
    pub rng_seed: u64,
    pub calibration_factor: f64,
    pub config: RunConfig,
    pub kpis: KpiReport,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("IO", format!("{}: {e}", path.display())))
}

fn write(path: &Path, body: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::new("IO", format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::new("PARSE", format!("{}: {e}", path.display())))
}

fn load(dir: &Path) -> Result<Dataset, CliError> {
    Dataset::load(dir).map_err(|e| CliError::new("DATASET", e))
}

fn factor_for(ds: &Dataset, factor: Option<f64>) -> Result<f64, CliError> {
    match factor {
        Some(f) => Ok(f),
        None => {
            let provider = ds.provider().map_err(|e| CliError::new("DATASET", e))?;
            Ok(calibrate(ds, &provider).map_err(|e| CliError::new("CALIBRATION", e))?.factor)
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Runs one parsed command and returns what it prints on stdout.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate {
            dataset,
            mode,
            delta_seconds,
            solver_timeout_ms,
            loop_budget_ms,
            seed,
            factor,
            realtime,
            out,
            log,
            stats,
        } => {
            let ds = load(&dataset)?;
            let factor = factor_for(&ds, factor)?;
            let mode = match mode {
                ModeArg::Baseline => Mode::Baseline,
                ModeArg::Optimized => Mode::Optimized,
            };
            let mut config = if realtime {
                RunConfig::realtime(mode, factor, seed)
            } else {
                RunConfig::deterministic(mode, factor, seed)
            };
            config.loop_config.delta = delta_seconds;
            config.loop_config.solver_timeout = Duration::from_millis(solver_timeout_ms);
            config.loop_config.loop_budget = Duration::from_millis(loop_budget_ms);
            if realtime {
                config.solver.time_budget = config.loop_config.solver_timeout;
            } else {
                config.loop_config.max_attempts = Some(attempts_within_budget(&config.loop_config));
            }
            let output = run(&ds, config.clone()).map_err(|e| CliError::new("SIMULATION", e))?;
            let kpis = compute_kpis(&output.log, &ds);
            let report = RunReport {
                schema_version: SCHEMA_VERSION,
                mode,
                rng_seed: seed,
                calibration_factor: factor,
                config,
                kpis,
            };
            write(&out, pretty(&report))?;
            if let Some(path) = log {
                let mut buf = Vec::new();
                write_jsonl(&output.log, &mut buf).expect("in-memory write");
                write(&path, buf)?;
            }
            if let Some(path) = stats {
                write(&path, pretty(&output.stats))?;
            }
            Ok(pretty(&summary(&report, &output.stats)))
        }
        Command::Calibrate { dataset } => {
            let ds = load(&dataset)?;
            let provider = ds.provider().map_err(|e| CliError::new("DATASET", e))?;
            let c = calibrate(&ds, &provider).map_err(|e| CliError::new("CALIBRATION", e))?;
            Ok(pretty(&c))
        }
        Command::Generate { spec, out } => {
            let spec: GeneratorSpec = parse(&spec)?;
            let ds = generate_dataset(&spec);
            ds.write(&out).map_err(|e| CliError::new("IO", e))?;
            Ok(pretty(&json!({
                "days": ds.days().len(),
                "orders": ds.orders.len(),
                "vehicles": ds.vehicles.len(),
                "out": out,
            })))
        }
        Command::Solve {
            task,
            time_budget_ms,
            seed,
            exact,
        } => {
            let task: VrptwTask = parse(&task)?;
            task.check(true).map_err(|e| CliError::new("TASK", e))?;
            let outcome = if exact {
                solve_exact(&task).map_err(|e| CliError::new("TASK", e))?
            } else {
                let config = SolverConfig {
                    time_budget: Duration::from_millis(time_budget_ms.max(1)),
                    rng_seed: seed,
                    ..SolverConfig::default()
                };
                solve(&task, &config)
            };
            let verdict = outcome.solution.as_ref().map(|s| validate_solution(&task, s));
            Ok(pretty(&json!({ "outcome": outcome, "verdict": verdict })))
        }
        Command::Compare {
            optimized,
            baseline,
            out,
            daily,
        } => {
            let o: RunReport = parse(&optimized)?;
            let b: RunReport = parse(&baseline)?;
            let c = compare(&o.kpis, &b.kpis);
            write(&out, c.to_csv())?;
            if let Some(path) = daily {
                write(&path, c.daily_csv())?;
            }
            Ok(pretty(&c))
        }
        Command::Serve {
            dataset,
            replay_speed,
            port,
            restaurant_id,
            factor,
            seed,
        } => {
            if !(replay_speed > 0.0 && replay_speed.is_finite()) {
                return Err(CliError::new("USAGE", "--replay-speed must be positive"));
            }
            let ds = load(&dataset)?;
            let factor = factor_for(&ds, factor)?;
            let session = Session::new(restaurant_id, Arc::new(ds), RunConfig::realtime(Mode::Optimized, factor, seed))
                .map_err(|e| CliError::new("SIMULATION", e))?;
            let handle = SessionHandle::new(session);
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::new("IO", e))?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
                    .await
                    .map_err(|e| CliError::new("IO", format!("port {port}: {e}")))?;
                eprintln!("{}", json!({ "listening": listener.local_addr().ok().map(|a| a.to_string()) }));
                spawn_replay(Arc::clone(&handle), replay_speed);
                axum::serve(listener, router(App::new(vec![handle])))
                    .await
                    .map_err(|e| CliError::new("IO", e))
            })?;
            Ok(String::new())
        }
    }
}

fn summary(report: &RunReport, stats: &RunStats) -> Value {
    json!({
        "mode": report.mode,
        "calibration_factor": report.calibration_factor,
        "totals": report.kpis.totals,
        "failed_days": report.kpis.failed_days,
        "episodes": stats.episodes.len(),
    })
}

/// Parses `args` (program name first) and runs the command. Usage errors
/// carry clap's rendered message.
pub fn main_with<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            Ok(e.to_string())
        }
        Err(e) => Err(CliError::new("USAGE", e.to_string().trim_end())),
    }
}
