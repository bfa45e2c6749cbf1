//! Command-line front end and HTTP service for the data-center TCO analyzer.
//!
//! [`run`] is the whole CLI behind a testable signature: arguments in, bytes
//! written to the two streams, exit code out.

pub mod render;
pub mod service;
pub mod source;

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dc_tco_core::scenario::apply_overrides;
use dc_tco_core::{
    compare, evaluate, sweep, Decimal, Error, ErrorKind, RoiConvention, Rounding, Scenario, SweepMetric, SweepSpec,
};
use serde::Serialize;

use crate::render::Granularity;
use crate::source::{ResolveError, SCENARIO_DIR_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dc-tco", version, about = "Data-center total cost of ownership analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every role of a scenario.
    Evaluate {
        #[command(flatten)]
        input: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Facility granularities to show, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "server,rack,facility")]
        granularity: Vec<Granularity>,
    },
    /// Compare two roles of a scenario.
    Compare {
        #[command(flatten)]
        input: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        role_a: String,
        #[arg(long)]
        role_b: String,
    },
    /// Evaluate a scenario once per value of one parameter.
    Sweep {
        #[command(flatten)]
        input: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Dotted parameter path, e.g. `facility.tariff.price_per_kwh` or `roles.role1.target_load`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = "total_cost")]
        metric: SweepMetric,
        /// Role whose metric is reported; defaults to the first role.
        #[arg(long)]
        role: Option<String>,
    },
    /// Serve the HTTP API (and dashboard assets when present).
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Directory of scenario documents; bundled scenarios are served without one.
        #[arg(long, env = SCENARIO_DIR_ENV)]
        scenario_dir: Option<PathBuf>,
        /// Directory of built dashboard assets served under `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file, or a name looked up in the scenario directory and the bundled set.
    #[arg(long, value_name = "PATH")]
    scenario: String,
    /// Directory searched for scenario names.
    #[arg(long, env = SCENARIO_DIR_ENV)]
    scenario_dir: Option<PathBuf>,
    /// Override the projection horizon.
    #[arg(long)]
    years: Option<u32>,
    #[arg(long)]
    roi_convention: Option<RoiConvention>,
    /// Override a numeric parameter, `path=value`; repeatable.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Presentation rounding for tables; CSV and JSON are always exact.
    #[arg(long, default_value = "cents")]
    rounding: Rounding,
    /// Add generation metadata (tool version, time) to the output.
    #[arg(long)]
    stamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

/// A failed command: exit code plus the message for the error stream.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err.kind() {
            ErrorKind::Internal if !matches!(err, Error::Io { .. }) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure { code, message: err.to_string() }
    }
}

impl From<ResolveError> for Failure {
    fn from(err: ResolveError) -> Self {
        match err {
            ResolveError::Scenario(e) => e.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

/// Runs the CLI. Data goes to `stdout` only on success; diagnostics go to `stderr`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Serve { bind, scenario_dir, assets } => {
            return serve_blocking(bind, service::ServiceConfig { scenario_dir, assets_dir: assets }, stderr)
        }
        command => execute(command),
    };
    match outcome {
        Ok(text) => match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "error: writing output: {e}");
                EXIT_INTERNAL
            }
        },
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

fn serve_blocking(bind: SocketAddr, config: service::ServiceConfig, stderr: &mut dyn Write) -> i32 {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(stderr, "error: starting runtime: {e}");
            return EXIT_INTERNAL;
        }
    };
    let _ = writeln!(stderr, "listening on http://{bind}");
    match runtime.block_on(service::serve(bind, config)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: serving on {bind}: {e}");
            EXIT_INTERNAL
        }
    }
}

fn load(input: &ScenarioArgs) -> Result<Scenario, Failure> {
    let mut scenario = source::resolve(&input.scenario, input.scenario_dir.as_deref())?;
    let mut overrides = Vec::new();
    for item in &input.overrides {
        let (path, value) =
            item.split_once('=').ok_or_else(|| Failure::input(format!("--set expects PATH=VALUE, got `{item}`")))?;
        let value: Decimal = value
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("--set {path}: `{value}` is not a decimal number")))?;
        overrides.push((path.trim().to_string(), value));
    }
    if let Some(years) = input.years {
        overrides.push(("economics.analysis_years".to_string(), Decimal::from(years)));
    }
    if !overrides.is_empty() {
        scenario = apply_overrides(&scenario, &overrides)?;
    }
    if let Some(convention) = input.roi_convention {
        scenario.economics.roi_convention = convention;
    }
    Ok(scenario)
}

fn parse_values(raw: &str) -> Result<Vec<Decimal>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<Decimal>().map_err(|_| Failure::input(format!("--values: `{v}` is not a decimal number"))))
        .collect()
}

fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Evaluate { input, output, granularity } => {
            let mut granularity = granularity;
            granularity.sort();
            granularity.dedup();
            if granularity.is_empty() {
                return Err(Failure::input("--granularity needs at least one of server, rack, facility"));
            }
            let report = evaluate(&load(&input)?)?;
            Ok(match output.format {
                Format::Table => stamped_text(&output, render::evaluate_table(&report, output.rounding, &granularity)),
                Format::Csv => stamped_text(&output, render::evaluate_csv(&report, &granularity)),
                Format::Json => stamped_json(&output, &report),
            })
        }
        Command::Compare { input, output, role_a, role_b } => {
            let report = evaluate(&load(&input)?)?;
            let summary = compare(&report, &role_a, &role_b)?;
            Ok(match output.format {
                Format::Table => stamped_text(&output, render::compare_table(&report, &summary, output.rounding)),
                Format::Csv => stamped_text(&output, render::compare_csv(&report, &summary)),
                Format::Json => stamped_json(&output, &summary),
            })
        }
        Command::Sweep { input, output, param, values, metric, role } => {
            let scenario = load(&input)?;
            let spec = SweepSpec { parameter_path: param, values: parse_values(&values)?, metric, role };
            let result = sweep(&scenario, &spec)?;
            let failed: Vec<String> = result
                .points
                .iter()
                .filter_map(|p| {
                    p.error.as_ref().map(|e| format!("  {} = {}: {}", spec.parameter_path, p.value, e.message))
                })
                .collect();
            if !failed.is_empty() {
                return Err(Failure::input(format!(
                    "{} of {} sweep point(s) failed:\n{}",
                    failed.len(),
                    result.points.len(),
                    failed.join("\n")
                )));
            }
            Ok(match output.format {
                Format::Table => stamped_text(&output, render::sweep_table(&result, output.rounding)),
                Format::Csv => stamped_text(&output, render::sweep_csv(&result)),
                Format::Json => stamped_json(&output, &result),
            })
        }
        Command::Serve { .. } => unreachable!("serve is dispatched before execute"),
    }
}

#[derive(Serialize)]
struct Stamp {
    tool: &'static str,
    version: &'static str,
    generated_unix_seconds: u64,
}

fn stamp() -> Stamp {
    Stamp {
        tool: "dc-tco",
        version: env!("CARGO_PKG_VERSION"),
        generated_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    }
}

fn stamped_text(output: &OutputArgs, body: String) -> String {
    if !output.stamp {
        return body;
    }
    let s = stamp();
    format!("# {} {} generated_unix_seconds={}\n{body}", s.tool, s.version, s.generated_unix_seconds)
}

fn stamped_json<T: Serialize>(output: &OutputArgs, body: &T) -> String {
    if !output.stamp {
        return render::json(body);
    }
    #[derive(Serialize)]
    struct Stamped<'a, T> {
        meta: Stamp,
        data: &'a T,
    }
    render::json(&Stamped { meta: stamp(), data: body })
}
