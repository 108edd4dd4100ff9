use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use randcompare_core::experiment::Treatment;
use randcompare_core::procedures::TestKind;
use randcompare_core::stats::{mean, sample_variance};
use randcompare_core::simulation::{self, EngineMode, Row, Scenario, SimulationConfig, TABLE_COLUMNS};
use serde::Serialize;

use crate::dataset::Dataset;
use crate::design::DesignSpec;
use crate::error::{exit, CliError};
use crate::format::{self, Format};
use crate::runner::{self, EngineChoice, TestRequest, TestSelection};
use crate::scenario_config::ScenarioFile;
use crate::simulate;

/// Tests of no treatment effect for two-arm experiments, with a size/power
/// simulation harness.
#[derive(Debug, Parser)]
#[command(name = "randcompare", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run tests on a `unit_id,treatment,response` CSV file.
    Test(TestArgs),
    /// Estimate rejection rates for built-in or user scenarios.
    Simulate(SimulateArgs),
    /// Check a data file (and optionally a design) without running tests.
    Validate(ValidateArgs),
    /// List the built-in scenarios.
    Scenarios,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Exact,
    Mc,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimEngineArg {
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated test names, or `all`.
    #[arg(long, default_value = "all")]
    pub tests: String,
    /// `crd` or a JSON design file.
    #[arg(long, default_value = "crd")]
    pub design: String,
    /// Defaults to exact enumeration for small supports and Monte Carlo
    /// otherwise.
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    /// Monte Carlo draws.
    #[arg(long)]
    pub mc: Option<u64>,
    #[arg(long, env = "RANDCOMPARE_SEED", default_value_t = 11)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// A built-in scenario id such as `t3.sc1`.
    pub scenario: Option<String>,
    /// A TOML or JSON scenario file.
    #[arg(long, conflicts_with_all = ["scenario", "all_tables"])]
    pub config: Option<PathBuf>,
    /// Run every built-in scenario.
    #[arg(long, conflicts_with = "scenario")]
    pub all_tables: bool,
    #[arg(long, default_value_t = 1000)]
    pub replicates: u64,
    #[arg(long, env = "RANDCOMPARE_SEED", default_value_t = 11)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub engine: Option<SimEngineArg>,
    /// Monte Carlo draws per replicate.
    #[arg(long)]
    pub mc: Option<u64>,
    /// Comma-separated test names; defaults to the six table columns.
    #[arg(long)]
    pub tests: Option<String>,
    /// `randomization`, `process`, or both (comma-separated).
    #[arg(long, default_value = "randomization,process")]
    pub rows: String,
    /// Worker threads; 0 uses every CPU.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub design: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

/// Parse `args` (including the program name), run, and return the exit
/// code. Results go to `stdout` (or `--out`), diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::DATA } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Test(a) => test_command(a, stdout, stderr),
        Command::Simulate(a) => simulate_command(a, stdout),
        Command::Validate(a) => validate_command(a, stdout),
        Command::Scenarios => {
            for s in simulation::registry() {
                writeln!(stdout, "{:<8} {}", s.name, s.description).map_err(io)?;
            }
            Ok(())
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--alpha must lie in (0, 1], got {alpha}")))
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(io),
    }
}

fn test_command(a: TestArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    check_alpha(a.alpha)?;
    let selection = TestSelection::parse(&a.tests)?;
    let choice = a.engine.map(|e| match e {
        EngineArg::Exact => EngineChoice::Exact,
        EngineArg::Mc => EngineChoice::MonteCarlo,
        EngineArg::Asymptotic => EngineChoice::Asymptotic,
    });
    let engine = runner::resolve_engine(choice, a.mc, a.seed)?;
    let data = Dataset::from_path(&a.data)?;
    let design = DesignSpec::from_arg(&a.design)?;
    let run = runner::run_tests(&TestRequest { data: &data, selection: &selection, design: &design, engine, alpha: a.alpha })?;
    if a.format != Format::Table {
        for n in &run.notices {
            let _ = writeln!(stderr, "note: {}: {}", n.test, n.error);
        }
    }
    emit(&format::test_run(&run, a.format)?, a.out.as_deref(), stdout)
}

fn parse_rows(arg: &str) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for name in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let row = Row::BOTH
            .into_iter()
            .find(|r| r.name() == name)
            .ok_or_else(|| CliError::Usage(format!("unknown row `{name}`; known: randomization, process")))?;
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage("no rows selected".into()));
    }
    Ok(rows)
}

fn parse_sim_tests(arg: Option<&str>) -> Result<Vec<TestKind>, CliError> {
    let Some(arg) = arg else { return Ok(TABLE_COLUMNS.to_vec()) };
    let mut tests = Vec::new();
    for name in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let t = TestKind::from_name(name)
            .ok_or_else(|| CliError::Usage(format!("unknown test `{name}`; known: {}", runner::known_tests())))?;
        if !tests.contains(&t) {
            tests.push(t);
        }
    }
    if tests.is_empty() {
        return Err(CliError::Usage("no tests selected".into()));
    }
    Ok(tests)
}

fn sim_engine(engine: Option<SimEngineArg>, mc: Option<u64>) -> Result<EngineMode, CliError> {
    match (engine, mc) {
        (None | Some(SimEngineArg::Auto), None) => Ok(EngineMode::Auto),
        (None | Some(SimEngineArg::Mc), Some(b)) => Ok(EngineMode::MonteCarlo(b)),
        (Some(SimEngineArg::Mc), None) => Err(CliError::Usage("--engine mc needs --mc <draws>".into())),
        (Some(SimEngineArg::Exact), None) => Ok(EngineMode::Exact),
        (Some(_), Some(_)) => Err(CliError::Usage("--mc only applies to the Monte Carlo engine".into())),
    }
}

fn simulate_command(a: SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = SimulationConfig {
        replicates: a.replicates,
        alpha: a.alpha,
        seed: a.seed,
        engine: sim_engine(a.engine, a.mc)?,
        tests: parse_sim_tests(a.tests.as_deref())?,
        rows: parse_rows(&a.rows)?,
    };
    config.validate()?;
    let scenarios: Vec<Scenario> = match (&a.scenario, &a.config, a.all_tables) {
        (Some(id), None, false) => vec![simulation::scenario(id).map_err(|e| CliError::Usage(e.to_string()))?],
        (None, Some(path), false) => vec![ScenarioFile::from_path(path)?.into_scenario()?],
        (None, None, true) => simulation::registry(),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of a scenario id, --config <file>, or --all-tables".into(),
            ))
        }
    };
    let output = simulate::simulate_all(&scenarios, &config, a.threads)?;
    emit(&format::simulation(&output, a.format)?, a.out.as_deref(), stdout)
}

#[derive(Serialize)]
struct ArmSummary {
    n: usize,
    mean: f64,
    /// Sample variance with divisor `n - 1`; absent for a single unit.
    variance: Option<f64>,
}

#[derive(Serialize)]
struct ValidateSummary {
    valid: bool,
    n: usize,
    binary: bool,
    arm1: ArmSummary,
    arm2: ArmSummary,
    difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<&'static str>,
}

fn arm_summary(values: &[f64]) -> ArmSummary {
    ArmSummary { n: values.len(), mean: mean(values), variance: sample_variance(values, 1).ok() }
}

fn validate_command(a: ValidateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let data = Dataset::from_path(&a.data)?;
    let design = match &a.design {
        Some(arg) => {
            let spec = DesignSpec::from_arg(arg)?;
            let d = spec.assignment_design(data.observed.assignment())?;
            d.check_positivity()?;
            Some(spec.label())
        }
        None => None,
    };
    let o = &data.observed;
    let (arm1, arm2) = (arm_summary(&o.arm(Treatment::One)), arm_summary(&o.arm(Treatment::Two)));
    let summary = ValidateSummary {
        valid: true,
        n: o.len(),
        binary: o.is_binary(),
        difference: arm1.mean - arm2.mean,
        arm1,
        arm2,
        design,
    };
    let text = match a.format {
        Format::Json => format::to_json(&summary)?,
        Format::Table | Format::Csv => {
            let var = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"));
            let mut s = format!("ok: {} units{}\n", summary.n, if summary.binary { ", binary responses" } else { "" });
            for (label, a) in [("arm 1", &summary.arm1), ("arm 2", &summary.arm2)] {
                s.push_str(&format!("{label}: n = {}, mean = {:.4}, variance = {}\n", a.n, a.mean, var(a.variance)));
            }
            s.push_str(&format!("difference = {:.4}\n", summary.difference));
            if let Some(d) = summary.design {
                s.push_str(&format!("design: {d}\n"));
            }
            s
        }
    };
    emit(&text, None, stdout)
}
