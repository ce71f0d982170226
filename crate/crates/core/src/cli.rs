//! Command-line front end. Exit codes: 0 success, 1 numerical failure,
//! 2 configuration error.

use crate::analysis::{lane_emden_first_zero_capped, regime_sweep, AnalysisError};
use crate::config::{ConfigError, LaneEmdenConfig, OutputFormat, RunConfig};
use crate::export::{csv_bytes, json_bytes, profile_csv, profile_json, units_label, Artifacts, ExportError, DIMENSIONLESS};
use crate::metric::{continuity_report, MetricPatch};
use crate::model::{solve_star, ModelError, ModelOutcome, SolutionProfile};
use crate::units::UnitSystem;
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "tovds", version, about = "Static stars with a cosmological constant")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: config `out`, else `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// `geom` (G = c = 1) or `si`.
    #[arg(long, global = true)]
    pub units: Option<UnitSystem>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve one model: profile, outcome and summary.
    Solve,
    /// Outcome map over a grid of scaled parameters.
    Sweep,
    /// Metric patching and continuity report of a monotone-short model.
    Metric,
    /// First zeros of the Lane–Emden(–de Sitter) functions.
    LaneEmden,
    /// Run the self-verification suite.
    Verify,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {"kind": self.kind(), "message": self.message(), "exit_code": self.exit_code()}
        })
        .to_string()
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidInput(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidInput(_) => CliError::Config(e.to_string()),
            AnalysisError::Model(m) => m.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// What a command produced: files to write, text for stdout, and an
/// optional failure that still leaves artifacts behind.
struct Output {
    artifacts: Artifacts,
    stdout: String,
    failure: Option<CliError>,
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let mut out_dir = cli.out.clone();
    let result = load_config(cli).and_then(|cfg| {
        out_dir = Some(cli.out.clone().unwrap_or_else(|| PathBuf::from(cfg.out.as_deref().unwrap_or("out"))));
        let jobs = cli.jobs.or(cfg.jobs);
        let output = with_jobs(jobs, || dispatch(cli.command, &cfg))??;
        let dir = out_dir.as_deref().unwrap_or(Path::new("out"));
        output.artifacts.write_all(dir)?;
        print!("{}", output.stdout);
        match output.failure {
            Some(f) => Err(f),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let json = e.to_json();
            eprintln!("{json}");
            if let Some(dir) = out_dir {
                let _ = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(dir.join("error.json"), json + "\n"));
            }
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if matches!(cli.command, Command::Verify | Command::LaneEmden) => RunConfig::default(),
        None => return Err(CliError::Config("--config <path> is required for this command".into())),
    };
    if let Some(u) = cli.units {
        cfg.units = u;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    Ok(cfg)
}

fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match cmd {
        Command::Solve => cmd_solve(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Metric => cmd_metric(cfg),
        Command::LaneEmden => cmd_lane_emden(cfg),
        Command::Verify => cmd_verify(),
    }
}

fn add_profile(a: &mut Artifacts, stem: &str, profile: &SolutionProfile, cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.format {
        OutputFormat::Csv => a.add(format!("{stem}.csv"), profile_csv(profile, cfg.units)?),
        OutputFormat::Json => a.add(format!("{stem}.json"), profile_json(profile, cfg.units)?),
    }
    Ok(())
}

#[derive(Serialize)]
struct OutcomeReport<'a> {
    #[serde(flatten)]
    outcome: &'a ModelOutcome,
    rho_c: f64,
    u_c: f64,
    alpha: f64,
    beta: f64,
    #[serde(rename = "Lambda")]
    lambda: f64,
    constant_pressure: bool,
    events: &'a [crate::model::EventLogEntry],
}

pub const CONSTANT_PRESSURE_NOTE: &str = "constant-pressure special case detected";

/// Human-readable summary of a solved model.
pub fn summary_text(profile: &SolutionProfile, outcome: &ModelOutcome) -> String {
    let mut s = format!("outcome: {}\n", outcome.tag());
    match outcome {
        ModelOutcome::MonotoneShort(bq) => {
            s += &format!(
                "r_+ = {:e}\nm_+ = {:e}\nkappa_+ = {:e}\nQ_+ = {:e}\nB = {:e}\n",
                bq.r_plus, bq.m_plus, bq.kappa_plus, bq.q_plus, bq.b
            );
        }
        ModelOutcome::NonMonotone { r } => s += &format!("pressure starts to increase at r = {r:e}\n"),
        ModelOutcome::HorizonDegenerate { r, kappa, .. } => {
            s += &format!("kappa falls to {kappa:e} at r = {r:e}\n");
        }
        ModelOutcome::Unterminated { r_max, u } => s += &format!("u = {u:e} > 0 at the cap r = {r_max:e}\n"),
    }
    if profile.constant_pressure {
        s += CONSTANT_PRESSURE_NOTE;
        s.push('\n');
    }
    s
}

fn cmd_solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let input = cfg.model_input()?;
    let mut a = Artifacts::default();
    let (profile, outcome) = match solve_star(&input) {
        Ok(r) => r,
        Err(ModelError::Integration { message, r, partial }) => {
            if let Some(p) = partial {
                add_profile(&mut a, "profile_partial", &p, cfg)?;
            }
            return Ok(Output {
                artifacts: a,
                stdout: String::new(),
                failure: Some(CliError::Numerical(format!("integration failed at r = {r:e}: {message}"))),
            });
        }
        Err(e) => return Err(e.into()),
    };
    add_profile(&mut a, "profile", &profile, cfg)?;
    let s = profile.scaling;
    let report = OutcomeReport {
        outcome: &outcome,
        rho_c: profile.rho_c,
        u_c: profile.u_c,
        alpha: s.alpha,
        beta: s.beta,
        lambda: profile.lambda,
        constant_pressure: profile.constant_pressure,
        events: &profile.events,
    };
    a.add("outcome.json", json_bytes(units_label(cfg.units), &report)?);
    let summary = summary_text(&profile, &outcome);
    a.add("summary.txt", format!("{}\n{summary}", cfg.units.header_line()).into_bytes());
    Ok(Output {
        artifacts: a,
        stdout: summary,
        failure: None,
    })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let eos = cfg.eos()?;
    let grid = cfg.sweep()?;
    let result = regime_sweep(&eos, &grid.alphas, &grid.betas, &cfg.tolerances, &cfg.options)?;
    let mut a = Artifacts::default();
    a.add("sweep.csv", csv_bytes(DIMENSIONLESS, &result.cells)?);
    a.add("sweep.json", json_bytes(DIMENSIONLESS, &result)?);
    let failed = result.cells.iter().filter(|c| c.error.is_some()).count();
    let stdout = format!(
        "{} cells, {} monotone-short, {} failed; epsilon0 estimate: {}\n",
        result.cells.len(),
        result.cells.iter().filter(|c| c.outcome == "MonotoneShort").count(),
        failed,
        result.epsilon0_estimate.map_or("none".into(), |e| format!("{e:e}"))
    );
    Ok(Output {
        artifacts: a,
        stdout,
        failure: None,
    })
}

#[derive(Serialize)]
struct ComponentRow {
    r: f64,
    g00: f64,
    g11: f64,
}

#[derive(Serialize)]
struct MetricBody<'a> {
    boundary: &'a crate::model::BoundaryQuantities,
    #[serde(rename = "Lambda")]
    lambda: f64,
    horizons: Option<crate::metric::HorizonPair>,
    horizons_bracket_star: bool,
    continuity: &'a crate::metric::ContinuityReport,
}

const METRIC_SAMPLES: usize = 400;

fn cmd_metric(cfg: &RunConfig) -> Result<Output, CliError> {
    let input = cfg.model_input()?;
    let (profile, outcome) = solve_star(&input)?;
    if !outcome.is_monotone_short() {
        return Err(CliError::Numerical(format!(
            "metric patching needs a monotone-short model, got {}",
            outcome.tag()
        )));
    }
    let patch = MetricPatch::new(&profile).map_err(|e| CliError::Numerical(e.to_string()))?;
    let report = continuity_report(&patch).map_err(|e| CliError::Numerical(e.to_string()))?;
    let rp = patch.bq.r_plus;
    let r_hi = (3.0 * rp).min(0.99 * patch.r_e());
    let rows = (0..=METRIC_SAMPLES)
        .map(|i| {
            let r = r_hi * i as f64 / METRIC_SAMPLES as f64;
            let (g00, g11) = patch.g_components(r).map_err(|e| CliError::Numerical(e.to_string()))?;
            Ok(ComponentRow { r, g00, g11 })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let units = units_label(cfg.units);
    let mut a = Artifacts::default();
    let body = MetricBody {
        boundary: &patch.bq,
        lambda: patch.lambda,
        horizons: patch.horizons,
        horizons_bracket_star: patch.horizons_bracket_star(),
        continuity: &report,
    };
    a.add("metric.json", json_bytes(units, &body)?);
    match cfg.format {
        OutputFormat::Csv => a.add("metric_components.csv", csv_bytes(units, &rows)?),
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Rows<'a> {
                samples: &'a [ComponentRow],
            }
            a.add("metric_components.json", json_bytes(units, &Rows { samples: &rows })?)
        }
    }
    let mut stdout = String::new();
    for e in &report.entries {
        stdout += &format!(
            "{} {:?} order {}: rel_err {:e} {}\n",
            e.component,
            e.side,
            e.order,
            e.rel_err,
            if e.pass { "pass" } else { "FAIL" }
        );
    }
    let failure = (!report.pass).then(|| CliError::Numerical("metric continuity check failed".into()));
    Ok(Output {
        artifacts: a,
        stdout,
        failure,
    })
}

#[derive(Serialize)]
struct ZeroRow {
    mu: f64,
    lambda: f64,
    xi1: Option<f64>,
    status: String,
}

fn cmd_lane_emden(cfg: &RunConfig) -> Result<Output, CliError> {
    let default = LaneEmdenConfig {
        mu: vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
        lambda: vec![0.0],
        r_cap: 1e4,
    };
    let le = cfg.lane_emden.as_ref().unwrap_or(&default);
    let mut rows = Vec::new();
    for &mu in &le.mu {
        for &lambda in &le.lambda {
            let (xi1, status) = match lane_emden_first_zero_capped(mu, lambda, le.r_cap) {
                Ok(Some(x)) => (Some(x), "zero".to_string()),
                Ok(None) => (None, "no_zero".to_string()),
                Err(e @ AnalysisError::InvalidInput(_)) => return Err(e.into()),
                Err(e) => (None, e.to_string()),
            };
            rows.push(ZeroRow { mu, lambda, xi1, status });
        }
    }
    let mut a = Artifacts::default();
    match cfg.format {
        OutputFormat::Csv => a.add("lane_emden.csv", csv_bytes(DIMENSIONLESS, &rows)?),
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Rows<'a> {
                rows: &'a [ZeroRow],
            }
            a.add("lane_emden.json", json_bytes(DIMENSIONLESS, &Rows { rows: &rows })?)
        }
    }
    let stdout = rows
        .iter()
        .map(|r| match r.xi1 {
            Some(x) => format!("{}, {}, {:.12}\n", r.mu, r.lambda, x),
            None => format!("{}, {}, {}\n", r.mu, r.lambda, r.status),
        })
        .collect();
    Ok(Output {
        artifacts: a,
        stdout,
        failure: None,
    })
}

fn cmd_verify() -> Result<Output, CliError> {
    let report = crate::verify::run_all();
    let artifacts = crate::verify::artifacts(&report)?;
    let stdout = report
        .criteria
        .iter()
        .map(|c| {
            format!(
                "[{}] {:>2} {}{}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.error.as_deref().map_or(String::new(), |e| format!(": {e}"))
            )
        })
        .collect();
    let failure = (!report.pass).then(|| {
        let failed: Vec<String> = report.criteria.iter().filter(|c| !c.pass).map(|c| c.id.to_string()).collect();
        CliError::Numerical(format!("verification failed for criteria {}", failed.join(", ")))
    });
    Ok(Output {
        artifacts,
        stdout,
        failure,
    })
}
