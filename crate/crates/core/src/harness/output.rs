//! Plot-ready CSV and JSON reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::integrate::Trajectory;
use crate::harness::monitor::{CheckStatus, MonitorReport};
use crate::harness::scenario::ScenarioRun;

/// Formats with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `t, state..., monitor...`, one row per sample.
pub fn write_csv(traj: &Trajectory, mut w: impl Write) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend(traj.state_names.iter().cloned());
    header.extend(traj.monitor_specs.iter().map(|s| s.name.clone()));
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for ((t, y), m) in traj.times.iter().zip(&traj.states).zip(&traj.monitors) {
        line.clear();
        line.push_str(&fmt_f64(*t));
        for v in y.iter().chain(m.iter()) {
            line.push(',');
            line.push_str(&fmt_f64(*v));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn csv_string(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_csv(traj, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Machine-readable outcome of one scenario run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub system: String,
    pub n: usize,
    pub epsilon: f64,
    pub d: f64,
    pub samples: usize,
    pub t_final: f64,
    pub passed: bool,
    pub failed_checks: Vec<String>,
    pub reported_checks: Vec<String>,
}

impl RunSummary {
    pub fn of(run: &ScenarioRun) -> Self {
        let names = |st: CheckStatus| -> Vec<String> {
            run.report
                .checks
                .iter()
                .filter(|c| c.status == st)
                .map(|c| c.name.clone())
                .collect()
        };
        RunSummary {
            scenario: run.name.clone(),
            system: run.system.name().into(),
            n: run.n,
            epsilon: run.epsilon,
            d: run.d,
            samples: run.trajectory.len(),
            t_final: run.trajectory.times.last().copied().unwrap_or(0.0),
            passed: run.report.passed,
            failed_checks: names(CheckStatus::Fail),
            reported_checks: names(CheckStatus::Reported),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub summary: PathBuf,
}

/// Writes `<name>.csv`, `<name>.report.json` and `<name>.summary.json` into `dir`.
pub fn write_run(run: &ScenarioRun, dir: &Path) -> Result<OutputPaths> {
    std::fs::create_dir_all(dir)?;
    let stem = if run.name.is_empty() { "scenario" } else { run.name.as_str() };
    let paths = OutputPaths {
        csv: dir.join(format!("{stem}.csv")),
        report: dir.join(format!("{stem}.report.json")),
        summary: dir.join(format!("{stem}.summary.json")),
    };
    let mut csv = std::io::BufWriter::new(std::fs::File::create(&paths.csv)?);
    write_csv(&run.trajectory, &mut csv)?;
    csv.flush()?;
    write_json(&paths.report, &run.report)?;
    write_json(&paths.summary, &RunSummary::of(run))?;
    Ok(paths)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a report back, e.g. for regression comparisons.
pub fn read_report(path: &Path) -> Result<MonitorReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
