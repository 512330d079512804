//! `qbounds`: lower bounds for quantum query complexity at desk scale.
//!
//! Exit codes: 0 all checks pass, 2 usage error, 3 solver failure,
//! 4 a re-checked inequality failed.

mod config;
mod report;
mod verify;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use qbounds::boolfn::BooleanFunction;
use qbounds::sim::{progress_audit, run, QueryAlgorithm};

use config::Config;
use report::{parse_grid, parse_rate, SWEEP_HEADER};
use verify::Level;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    CheckFailed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::CheckFailed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<qbounds::Error> for CliError {
    fn from(e: qbounds::Error) -> Self {
        use qbounds::Error as E;
        match e {
            E::Input(_) | E::Domain(_) | E::Range(_) => CliError::Usage(e.to_string()),
            E::Numeric { .. } | E::Logic(_) => CliError::Solver(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qbounds", version, about = "Query lower bounds from Gram-matrix progress measures")]
struct Cli {
    /// TOML config with `seed` and a `[tolerances]` table; defaults to $QBOUNDS_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, clap::Args)]
#[group(required = true, multiple = false)]
struct FunctionArg {
    /// Catalog function: or, and, parity, maj.
    #[arg(long)]
    function: Option<String>,
    /// Truth table as hex (bit x is f(x)) or a list of 2ⁿ bits.
    #[arg(long)]
    table: Option<String>,
}

impl FunctionArg {
    fn resolve(&self, n: usize) -> Result<(BooleanFunction, Option<String>), CliError> {
        match (&self.function, &self.table) {
            (Some(name), _) => Ok((BooleanFunction::catalog(name, n)?, Some(name.to_lowercase()))),
            (None, Some(t)) => Ok((BooleanFunction::parse_table(n, t)?, None)),
            (None, None) => Err(CliError::Usage("need --function or --table".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every applicable bound for one function, with re-checked inequalities.
    Bounds {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long)]
        n: usize,
        /// Error parameter ε in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Adversary rate c > 1, as a number or 2^k; repeatable.
        #[arg(long = "c")]
        rates: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Add a wall-clock timestamp (the report is then no longer reproducible).
        #[arg(long)]
        timestamp: bool,
    },
    /// MADV₀ and its envelopes over a geometric grid of rates, as CSV.
    SweepC {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long)]
        n: usize,
        /// `2^a..2^b[:step]` or a comma-separated list.
        #[arg(long, default_value = "2^2..2^20")]
        c_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the property suite over every module.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Negative control: corrupt one witness so the cap check must fail.
        #[arg(long)]
        inject_defect: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulates a random query algorithm and audits its progress.
    Audit {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        queries: usize,
        #[arg(long, default_value_t = 2)]
        workspace: usize,
        #[arg(long = "c", default_value = "10")]
        rate: String,
        /// Write the trajectory as JSON here.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
}

const DEFAULT_SEED: u64 = 20240601;

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    let tol = cfg.tolerances;
    match cli.command {
        Command::Bounds {
            function,
            n,
            eps,
            rates,
            out,
            format,
            timestamp,
        } => {
            let (f, name) = function.resolve(n)?;
            if !(0.0..1.0).contains(&eps) {
                return Err(CliError::Usage(format!("--eps {eps} outside [0, 1)")));
            }
            let rates = rates.iter().map(|r| parse_rate(r)).collect::<Result<Vec<_>, _>>()?;
            let mut rep = report::bounds(&f, name, eps, &rates, &tol)?;
            if timestamp {
                let secs = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                rep.timestamp = Some(format!("{secs}"));
            }
            let text = match format {
                Format::Json => to_json(&rep),
                Format::Table => rep.to_table(),
            };
            emit(out.as_deref(), &text)?;
            if !rep.all_pass() {
                let failed: Vec<&str> =
                    rep.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                return Err(CliError::CheckFailed(failed.join("; ")));
            }
            Ok(())
        }
        Command::SweepC {
            function,
            n,
            c_grid,
            out,
        } => {
            let (f, _) = function.resolve(n)?;
            let grid = parse_grid(&c_grid)?;
            let sw = report::sweep(&f, &grid, &tol)?;
            let mut text = format!("{SWEEP_HEADER}\n");
            for r in &sw.rows {
                text += &r.csv();
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            let failed: Vec<&str> =
                sw.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::CheckFailed(failed.join("; ")));
            }
            Ok(())
        }
        Command::Verify {
            seed,
            level,
            inject_defect,
            out,
        } => {
            let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            let summary = verify::run_suite(seed, level, inject_defect, tol);
            emit(out.as_deref(), &to_json(&summary))?;
            if !summary.all_pass() {
                return Err(CliError::CheckFailed(format!("{} suite cases failed", summary.failed)));
            }
            Ok(())
        }
        Command::Audit {
            seed,
            n,
            queries,
            workspace,
            rate,
            trajectory,
        } => {
            let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            let c = parse_rate(&rate)?;
            let alg = QueryAlgorithm::random(n, queries, workspace, seed)?;
            let traj = run(&alg)?;
            if let Some(p) = trajectory {
                emit(Some(&p), &traj.to_json())?;
            }
            let audit = progress_audit(&traj, c, &tol)?;
            emit(None, &to_json(&audit))?;
            if audit.violations > 0 {
                return Err(CliError::CheckFailed(format!("{} progress violations", audit.violations)));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbounds: {e}");
            ExitCode::from(e.code())
        }
    }
}
