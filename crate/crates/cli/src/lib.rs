//! Batch front end for the conic path-following simulator.
//!
//! Exit codes: 0 success, 1 validation suites failed, 2 configuration or
//! usage error, 3 simulation error (blowup or degenerate geometry).

pub mod overrides;

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conicpath::scenario::{builtin, BUILTIN_SCENARIOS};
use conicpath::sim::log::write_csv;
use conicpath::validate::{run_all, Fault, SuiteReport, ValidationOptions};
use conicpath::{compute_metrics, MetricsReport, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use overrides::{apply_override, parse_override, Override};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "conicpath", version, about = "Sliding-mode conic path following: runs, sweeps and validation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its trajectory, metrics and manifest.
    Run(RunArgs),
    /// Run the invariant suites and print a pass/fail table.
    Validate(ValidateArgs),
    /// Run a scenario once per value of one parameter.
    Sweep(SweepArgs),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// built-in scenario name
    pub scenario: Option<String>,
    /// scenario JSON file, or a manifest.json from an earlier run
    #[arg(long, conflicts_with = "scenario")]
    pub config: Option<PathBuf>,
    /// output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// `key=value`, repeatable; keys are aliases (dt, lambda_r, ...) or dotted paths
    #[arg(long = "override", value_name = "K=V")]
    pub overrides: Vec<String>,
    /// keep every N-th control tick in the trajectory log
    #[arg(long)]
    pub decimate: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: ScenarioArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Inject {
    None,
    HalveGain,
    FlipF13,
}

impl From<Inject> for Fault {
    fn from(i: Inject) -> Self {
        match i {
            Inject::None => Fault::None,
            Inject::HalveGain => Fault::HalveGain,
            Inject::FlipF13 => Fault::FlipF13,
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Monte-Carlo draws per randomized suite
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// deliberately break the controller to check the suites catch it
    #[arg(long, value_enum, default_value_t = Inject::None)]
    pub inject: Inject,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ScenarioArgs,
    /// parameter to vary (same keys as --override)
    #[arg(long)]
    pub param: String,
    /// comma-separated values
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub values: Vec<String>,
}

/// Error carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Sim(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Sim(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Sim(m) => write!(f, "simulation error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// final configuration, overrides and decimation already applied
    pub scenario: Scenario,
    pub overrides: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub param: String,
    pub value: String,
    pub name: String,
    /// error message when the run failed
    pub error: Option<String>,
}

/// Available scenarios, one per line.
pub fn scenario_listing() -> String {
    BUILTIN_SCENARIOS.join("\n")
}

/// Loads a scenario by name or file, then applies overrides and decimation.
pub fn resolve_scenario(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let base = match (&args.scenario, &args.config) {
        (Some(name), None) => builtin(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown scenario '{name}'; available: {}",
                BUILTIN_SCENARIOS.join(", ")
            ))
        })?,
        (None, Some(path)) => load_config(path)?,
        _ => {
            return Err(CliError::Config(format!(
                "give a scenario name or --config; available: {}",
                BUILTIN_SCENARIOS.join(", ")
            )))
        }
    };
    let mut sc = with_overrides(&base, &args.overrides)?;
    if let Some(n) = args.decimate {
        sc.sim.decimate = n;
    }
    sc.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(sc)
}

/// Reads a scenario JSON file or the scenario echoed in a manifest.
pub fn load_config(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let inner = match value.get("scenario") {
        Some(s) if value.get("tool").is_some() => s.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn with_overrides(base: &Scenario, overrides: &[String]) -> Result<Scenario, CliError> {
    let mut value = serde_json::to_value(base).expect("scenario serializes");
    for raw in overrides {
        let ov = parse_override(raw).map_err(CliError::Config)?;
        apply_override(&mut value, &ov).map_err(CliError::Config)?;
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("after overrides: {e}")))
}

/// Runs a scenario and writes `<name>_trajectory.csv` and `<name>_metrics.json`.
/// Metrics always come from the full-rate log; `sim.decimate` only thins the CSV.
pub fn run_and_write(sc: &Scenario, out: &Path) -> Result<(MetricsReport, Vec<String>), CliError> {
    let mut full = sc.clone();
    full.sim.decimate = 1;
    let log = full.run().map_err(|e| match e.root() {
        conicpath::Error::InvalidConfig(_) | conicpath::Error::InvalidTarget(_) => CliError::Config(e.to_string()),
        _ => CliError::Sim(e.to_string()),
    })?;
    let metrics = compute_metrics(&log, sc).map_err(|e| CliError::Sim(e.to_string()))?;
    let csv_name = format!("{}_trajectory.csv", sc.name);
    let json_name = format!("{}_metrics.json", sc.name);
    let csv_path = out.join(&csv_name);
    let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    write_csv(&log.decimated(sc.sim.decimate).records, BufWriter::new(file)).map_err(|e| CliError::Io(e.to_string()))?;
    let json_path = out.join(&json_name);
    fs::write(&json_path, metrics_json(&metrics)).map_err(io_err(&json_path))?;
    Ok((metrics, vec![csv_name, json_name]))
}

pub fn metrics_json(m: &MetricsReport) -> String {
    serde_json::to_string_pretty(m).expect("metrics serialize") + "\n"
}

fn write_manifest(out: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

pub fn metrics_summary(name: &str, m: &MetricsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario        {name}");
    let _ = writeln!(s, "termination     {:?} at t = {:.3} s", m.termination, m.t_final);
    let _ = writeln!(s, "capture (s)     {}", fmt_opt(m.capture_time_all));
    if m.recapture_delay.is_some() {
        let _ = writeln!(s, "recapture (s)   {}", fmt_opt(m.recapture_delay));
    }
    let _ = writeln!(s, "terminal |h~|/h {:.3e}", m.terminal_h_err_rel);
    let _ = writeln!(s, "terminal |e~|   {:.3e}", m.terminal_e_err);
    let _ = writeln!(s, "terminal beta   {:.3} deg", m.terminal_beta_deg);
    let _ = writeln!(s, "delta-v         {:.4} m/s", m.delta_v_total);
    let _ = writeln!(s, "chattering      {:.3}", m.chattering_index);
    let _ = writeln!(s, "lyapunov        {}/{} violations", m.lyapunov_violations, m.lyapunov_checked);
    s
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let sc = resolve_scenario(&args.common)?;
    let out = &args.common.out;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let (metrics, mut outputs) = run_and_write(&sc, out)?;
    outputs.push("manifest.json".into());
    write_manifest(
        out,
        &Manifest {
            tool: "conicpath".into(),
            version: VERSION.into(),
            command: "run".into(),
            scenario: sc.clone(),
            overrides: args.common.overrides.clone(),
            outputs,
            sweep: vec![],
        },
    )?;
    print!("{}", metrics_summary(&sc.name, &metrics));
    Ok(())
}

pub fn validation_table(reports: &[SuiteReport]) -> String {
    let mut s = format!(
        "{:<24} {:<6} {:>8} {:>9} {:>11}  detail\n",
        "suite", "result", "checked", "failures", "worst"
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{:<24} {:<6} {:>8} {:>9} {:>11.3e}  {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.checked,
            r.failures,
            r.worst,
            r.detail
        );
    }
    s
}

/// Returns true when every suite passed.
pub fn cmd_validate(args: &ValidateArgs) -> bool {
    let opts = ValidationOptions {
        samples: args.samples,
        seed: args.seed,
        fault: args.inject.into(),
    };
    let reports = run_all(&opts);
    print!("{}", validation_table(&reports));
    reports.iter().all(|r| r.passed)
}

fn sanitize(v: &str) -> String {
    v.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

/// One row of the combined sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub name: String,
    pub result: Result<MetricsReport, String>,
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "value",
    "name",
    "status",
    "capture_time",
    "terminal_h_err_rel",
    "terminal_e_err",
    "terminal_beta_deg",
    "delta_v",
    "chattering_index",
    "decay_slope",
    "lyapunov_violations",
];

pub fn sweep_table(param: &str, rows: &[SweepRow]) -> String {
    let mut s = format!("# param = {param}\n{}\n", SWEEP_COLUMNS.join(","));
    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:?}"));
    for r in rows {
        match &r.result {
            Ok(m) => {
                let _ = writeln!(
                    s,
                    "{},{},ok,{},{:?},{:?},{:?},{:?},{:?},{},{}",
                    r.value,
                    r.name,
                    opt(m.capture_time_all),
                    m.terminal_h_err_rel,
                    m.terminal_e_err,
                    m.terminal_beta_deg,
                    m.delta_v_total,
                    m.chattering_index,
                    opt(m.decay_slope),
                    m.lyapunov_violations
                );
            }
            Err(e) => {
                let _ = writeln!(s, "{},{},\"error: {}\",,,,,,,,", r.value, r.name, e.replace('"', "'"));
            }
        }
    }
    s
}

/// Runs every value concurrently. Failed runs are kept in the table.
pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    if args.values.iter().all(|v| v.trim().is_empty()) {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let base = resolve_scenario(&args.common)?;
    let out = &args.common.out;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut prepared = Vec::new();
    for v in args.values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()) {
        let mut sc = with_overrides(&base, &[format!("{}={v}", args.param)])?;
        sc.name = format!("{}_{}_{}", base.name, sanitize(&args.param), sanitize(v));
        sc.validate().map_err(|e| CliError::Config(format!("{}={v}: {e}", args.param)))?;
        prepared.push((v.to_string(), sc));
    }
    let rows: Vec<SweepRow> = prepared
        .par_iter()
        .map(|(v, sc)| SweepRow {
            value: v.clone(),
            name: sc.name.clone(),
            result: run_and_write(sc, out).map(|(m, _)| m).map_err(|e| e.to_string()),
        })
        .collect();

    let table_name = format!("{}_sweep.csv", base.name);
    let table_path = out.join(&table_name);
    let table = sweep_table(&args.param, &rows);
    fs::write(&table_path, &table).map_err(io_err(&table_path))?;
    let mut outputs = vec![table_name];
    let mut sweep = Vec::new();
    for r in &rows {
        if r.result.is_ok() {
            outputs.push(format!("{}_trajectory.csv", r.name));
            outputs.push(format!("{}_metrics.json", r.name));
        }
        sweep.push(SweepEntry {
            param: args.param.clone(),
            value: r.value.clone(),
            name: r.name.clone(),
            error: r.result.as_ref().err().cloned(),
        });
    }
    outputs.push("manifest.json".into());
    write_manifest(
        out,
        &Manifest {
            tool: "conicpath".into(),
            version: VERSION.into(),
            command: "sweep".into(),
            scenario: base,
            overrides: args.common.overrides.clone(),
            outputs,
            sweep,
        },
    )?;
    print!("{table}");
    Ok(rows)
}

pub fn dispatch(cli: Cli) -> ExitCode {
    let res = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Validate(a) => {
            return if cmd_validate(a) { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
        Command::Sweep(a) => cmd_sweep(a).and_then(|rows| {
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Sim(format!("{failed} of {} sweep runs failed", rows.len())))
            }
        }),
        Command::ListScenarios => {
            println!("{}", scenario_listing());
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("conicpath: {e}");
            ExitCode::from(e.code())
        }
    }
}
