//! Drift report over the monitored quantities of a trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::integrate::{MonitorKind, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Tracked only; the quantity is not conserved for these parameters.
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: MonitorKind,
    pub tolerance: f64,
    pub initial: f64,
    /// `max |v(t) − v(0)|` for integrals, `max |v(t)|` for residuals.
    pub max_abs_drift: f64,
    /// Absolute drift over `|v(0)|` for integrals; equal to the absolute value for residuals.
    pub max_rel_drift: f64,
    pub status: CheckStatus,
}

impl CheckResult {
    /// The number compared against the tolerance.
    pub fn judged(&self) -> f64 {
        match self.kind {
            MonitorKind::Integral => self.max_rel_drift,
            MonitorKind::Residual => self.max_abs_drift,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl MonitorReport {
    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// Evaluates the named checks (all monitors when `checks` is empty).
pub fn monitor_suite(traj: &Trajectory, checks: &[String]) -> Result<MonitorReport> {
    if traj.is_empty() {
        return Err(Error::Config("monitor suite needs a nonempty trajectory".into()));
    }
    let names: Vec<String> = if checks.is_empty() {
        traj.monitor_specs.iter().map(|s| s.name.clone()).collect()
    } else {
        checks.to_vec()
    };
    let mut out = Vec::with_capacity(names.len());
    for name in &names {
        let idx = traj.monitor_specs.iter().position(|s| &s.name == name).ok_or_else(|| {
            let known: Vec<_> = traj.monitor_specs.iter().map(|s| s.name.as_str()).collect();
            Error::Config(format!("unknown check '{name}' (available: {})", known.join(", ")))
        })?;
        let spec = &traj.monitor_specs[idx];
        let series = traj.monitors.iter().map(|row| row[idx]);
        let v0 = traj.monitors[0][idx];
        let (abs, rel) = match spec.kind {
            MonitorKind::Integral => {
                let abs = series.map(|v| (v - v0).abs()).fold(0.0, f64::max);
                let rel = if v0 != 0.0 { abs / v0.abs() } else { abs };
                (abs, rel)
            }
            MonitorKind::Residual => {
                let abs = series.map(f64::abs).fold(0.0, f64::max);
                (abs, abs)
            }
        };
        let mut r = CheckResult {
            name: name.clone(),
            kind: spec.kind,
            tolerance: spec.tolerance,
            initial: v0,
            max_abs_drift: abs,
            max_rel_drift: rel,
            status: CheckStatus::Reported,
        };
        if spec.checked {
            // NaN never passes
            r.status = if r.judged() < spec.tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
        }
        out.push(r);
    }
    let passed = out.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(MonitorReport { checks: out, passed })
}
