//! Rendering of command results as JSON, a plain-text table, or CSV.
//!
//! Every renderer is a pure function of its input, so repeated runs with
//! the same arguments produce identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::CliError;
use crate::runner::TestRun;
use crate::simulate::SimulationOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.digits$}"))
}

pub fn test_run(run: &TestRun, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(run),
        Format::Table => Ok(test_table(run)),
        Format::Csv => test_csv(run),
    }
}

fn test_table(run: &TestRun) -> String {
    let d = &run.dataset;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n1 = {}, n2 = {}, mean1 = {:.4}, mean2 = {:.4}, difference = {:.4}",
        d.n1, d.n2, d.mean1, d.mean2, d.difference
    );
    let e = &run.engine;
    let mut engine = e.mode.to_string();
    if let Some(b) = e.budget {
        let _ = write!(engine, ", budget {b}");
    }
    if let Some(seed) = e.seed {
        let _ = write!(engine, ", seed {seed}");
    }
    let _ = writeln!(s, "design: {}; engine: {engine}; rng: {}", run.design, run.rng);
    if let Some(d3) = run.d3 {
        let _ = writeln!(s, "D3 = {d3:.4}");
    }
    if let Some(z3) = run.z3 {
        let _ = writeln!(s, "Z3 = {z3:.4}");
    }
    let _ = writeln!(
        s,
        "\n{:<18} {:<5} {:>12} {:>10} {:<12} {:>10}  reject at {}",
        "test", "null", "statistic", "p-value", "kind", "mc stderr", run.alpha
    );
    for r in &run.reports {
        let flag = if r.degenerate { " (degenerate)" } else { "" };
        let _ = writeln!(
            s,
            "{:<18} {:<5} {:>12.4} {:>10.6} {:<12} {:>10}  {}{flag}",
            r.test,
            r.hypothesis,
            r.statistic,
            r.p_value,
            r.p_value_kind,
            opt(r.mc_stderr, 6),
            if r.reject { "yes" } else { "no" },
        );
    }
    if !run.notices.is_empty() {
        s.push('\n');
        for n in &run.notices {
            let _ = writeln!(s, "note: {}: {}", n.test, n.error);
        }
    }
    s
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| CliError::Io(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn test_csv(run: &TestRun) -> Result<String, CliError> {
    csv_string(|w| {
        w.write_record(["test", "hypothesis", "statistic", "p_value", "p_value_kind", "mc_stderr", "reject", "degenerate"])?;
        for r in &run.reports {
            w.write_record([
                r.test.to_string(),
                r.hypothesis.to_string(),
                r.statistic.to_string(),
                r.p_value.to_string(),
                r.p_value_kind.to_string(),
                r.mc_stderr.map(|x| x.to_string()).unwrap_or_default(),
                r.reject.to_string(),
                r.degenerate.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn simulation(out: &SimulationOutput, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(out),
        Format::Table => Ok(simulation_table(out)),
        Format::Csv => simulation_csv(out),
    }
}

/// One block per scenario: a line per sampling row, a column per test,
/// rejection rates in percent.
fn simulation_table(out: &SimulationOutput) -> String {
    let mut s = String::new();
    for (i, run) in out.runs.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "{}: {}", run.scenario, run.description);
        let _ = writeln!(
            s,
            "n1 = {}, n2 = {}, {} replicates, alpha {}, seed {}, engine {}",
            run.n1, run.n2, run.replicates, run.alpha, run.seed, run.engine
        );
        let mut tests: Vec<&str> = Vec::new();
        let mut rows: Vec<&str> = Vec::new();
        for e in &run.estimates {
            if !tests.contains(&e.test) {
                tests.push(e.test);
            }
            if !rows.contains(&e.row) {
                rows.push(e.row);
            }
        }
        let _ = write!(s, "{:<14}", "");
        for t in &tests {
            let _ = write!(s, " {t:>12}");
        }
        s.push('\n');
        for row in &rows {
            let _ = write!(s, "{row:<14}");
            for t in &tests {
                let rate = run.estimates.iter().find(|e| e.row == *row && e.test == *t).and_then(|e| e.rejection_rate);
                let _ = write!(s, " {:>12}", opt(rate, 1));
            }
            s.push('\n');
        }
    }
    s
}

fn simulation_csv(out: &SimulationOutput) -> Result<String, CliError> {
    csv_string(|w| {
        w.write_record(["scenario", "row", "test", "replicates", "rejections", "rejection_rate", "mc_stderr"])?;
        for run in &out.runs {
            for e in &run.estimates {
                w.write_record([
                    run.scenario.clone(),
                    e.row.to_string(),
                    e.test.to_string(),
                    e.replicates.to_string(),
                    e.rejections.map(|x| x.to_string()).unwrap_or_default(),
                    e.rejection_rate.map(|x| x.to_string()).unwrap_or_default(),
                    e.mc_stderr.map(|x| x.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        Ok(())
    })
}
