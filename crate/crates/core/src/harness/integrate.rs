//! Explicit Runge–Kutta integrators with optional projection onto the
//! constraint manifold after every accepted step.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Factor over a residual tolerance at which integration is aborted.
pub const BLOW_UP_FACTOR: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Rk45,
}

/// How a monitored quantity is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorKind {
    /// Should stay at its initial value; judged by relative drift.
    Integral,
    /// Should stay at zero; judged by its absolute value.
    Residual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorSpec {
    pub name: String,
    pub kind: MonitorKind,
    pub tolerance: f64,
    /// `false` for quantities that are tracked but not expected to be conserved.
    pub checked: bool,
}

impl MonitorSpec {
    pub fn integral(name: &str, tolerance: f64) -> Self {
        MonitorSpec {
            name: name.into(),
            kind: MonitorKind::Integral,
            tolerance,
            checked: true,
        }
    }

    pub fn residual(name: &str, tolerance: f64) -> Self {
        MonitorSpec {
            name: name.into(),
            kind: MonitorKind::Residual,
            tolerance,
            checked: true,
        }
    }

    pub fn reported(mut self) -> Self {
        self.checked = false;
        self
    }
}

/// An autonomous ODE `ẏ = f(y)` on a flat state vector.
pub trait OdeSystem: Send + Sync {
    fn dim(&self) -> usize;

    fn rhs(&self, y: &DVector<f64>) -> Result<DVector<f64>>;

    /// Maps a state back onto the constraint manifold.
    fn project(&self, _y: &mut DVector<f64>) {}

    fn state_names(&self) -> Vec<String>;

    fn monitor_specs(&self) -> Vec<MonitorSpec> {
        Vec::new()
    }

    /// Values in the order of [`OdeSystem::monitor_specs`].
    fn monitors(&self, _y: &DVector<f64>) -> Result<Vec<f64>> {
        Ok(Vec::new())
    }

    /// `+1` or `−1`: the sign of the time step.
    fn direction(&self) -> f64 {
        1.0
    }
}

fn default_method() -> Method {
    Method::Rk4
}
fn default_h() -> f64 {
    1e-3
}
fn default_atol() -> f64 {
    1e-12
}
fn default_rtol() -> f64 {
    1e-10
}
fn default_true() -> bool {
    true
}
fn default_stride() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    /// Fixed step for RK4, initial step for RK45 (s).
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_true")]
    pub projection: bool,
    /// Length of the integration interval (s).
    pub t_end: f64,
    /// Record every `stride`-th step.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn rk4(h: f64, t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            h,
            atol: default_atol(),
            rtol: default_rtol(),
            projection: true,
            t_end,
            stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("integrator.{name} must be positive, got {v}")))
            }
        };
        pos("h", self.h)?;
        pos("atol", self.atol)?;
        pos("rtol", self.rtol)?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!(
                "integrator.t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.stride == 0 {
            return Err(Error::Config("integrator.stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Time-ordered samples of state and monitors.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub state_names: Vec<String>,
    pub monitor_specs: Vec<MonitorSpec>,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub monitors: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory is not empty")
    }

    /// Column `name` of the monitor table.
    pub fn monitor_series(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.monitor_specs.iter().position(|m| m.name == name)?;
        Some(self.monitors.iter().map(|row| row[idx]).collect())
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step(sys: &dyn OdeSystem, y: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&(y + &k1 * (h / 2.0)))?;
    let k3 = sys.rhs(&(y + &k2 * (h / 2.0)))?;
    let k4 = sys.rhs(&(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order solution and the scaled error norm.
pub fn dopri_step(
    sys: &dyn OdeSystem,
    y: &DVector<f64>,
    h: f64,
    atol: f64,
    rtol: f64,
) -> Result<(DVector<f64>, f64)> {
    debug_assert_eq!(DP_C.len(), 7);
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            if DP_A[s][j] != 0.0 {
                ys += kj * (h * DP_A[s][j]);
            }
        }
        k.push(sys.rhs(&ys)?);
    }
    let mut y5 = y.clone();
    let mut err = DVector::zeros(y.len());
    for s in 0..7 {
        y5 += &k[s] * (h * DP_B5[s]);
        err += &k[s] * (h * (DP_B5[s] - DP_B4[s]));
    }
    let norm = (0..y.len())
        .map(|i| {
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum::<f64>()
        / y.len().max(1) as f64;
    Ok((y5, norm.sqrt()))
}

struct Recorder<'a> {
    sys: &'a dyn OdeSystem,
    specs: Vec<MonitorSpec>,
    traj: Trajectory,
}

impl<'a> Recorder<'a> {
    fn new(sys: &'a dyn OdeSystem) -> Self {
        let specs = sys.monitor_specs();
        Recorder {
            sys,
            traj: Trajectory {
                state_names: sys.state_names(),
                monitor_specs: specs.clone(),
                times: Vec::new(),
                states: Vec::new(),
                monitors: Vec::new(),
            },
            specs,
        }
    }

    /// Aborts when a residual monitor exceeds `BLOW_UP_FACTOR` times its tolerance.
    fn guard(&self, t: f64, y: &DVector<f64>) -> Result<Vec<f64>> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                time: t,
                residual: "non-finite state".into(),
                value: f64::NAN,
            });
        }
        let values = self.sys.monitors(y)?;
        for (spec, v) in self.specs.iter().zip(values.iter()) {
            if spec.kind == MonitorKind::Residual && (v.abs() > BLOW_UP_FACTOR * spec.tolerance || !v.is_finite()) {
                return Err(Error::BlowUp {
                    time: t,
                    residual: spec.name.clone(),
                    value: *v,
                });
            }
        }
        Ok(values)
    }

    fn record(&mut self, t: f64, y: &DVector<f64>, values: Vec<f64>) {
        self.traj.times.push(t);
        self.traj.states.push(y.clone());
        self.traj.monitors.push(values);
    }
}

/// Integrates `sys` from `y0` over `[0, t_end]` (or `[−t_end, 0]` for systems
/// with negative direction).
pub fn integrate_system(sys: &dyn OdeSystem, y0: &DVector<f64>, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if y0.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "initial state has length {}, system expects {}",
            y0.len(),
            sys.dim()
        )));
    }
    let dir = sys.direction();
    let mut rec = Recorder::new(sys);
    let mut y = y0.clone();
    let v0 = rec.guard(0.0, &y)?;
    rec.record(0.0, &y, v0);
    match cfg.method {
        Method::Rk4 => {
            let steps = (cfg.t_end / cfg.h - 1e-9).ceil().max(0.0) as usize;
            if steps == 0 {
                return Ok(rec.traj);
            }
            let h = cfg.t_end / steps as f64 * dir;
            for i in 1..=steps {
                y = rk4_step(sys, &y, h)?;
                let t = h * i as f64;
                let vals = rec.guard(t, &y)?;
                let vals = if cfg.projection {
                    sys.project(&mut y);
                    sys.monitors(&y)?
                } else {
                    vals
                };
                if i % cfg.stride == 0 || i == steps {
                    rec.record(t, &y, vals);
                }
            }
        }
        Method::Rk45 => {
            let t_end = cfg.t_end;
            let mut t = 0.0_f64;
            let mut h = cfg.h.min(t_end);
            let mut accepted = 0usize;
            let mut rejected_in_row = 0usize;
            while t < t_end * (1.0 - 1e-14) {
                h = h.min(t_end - t);
                let (y_new, err) = dopri_step(sys, &y, h * dir, cfg.atol, cfg.rtol)?;
                if err <= 1.0 || h < 1e-14 * t_end.max(1.0) {
                    t += h;
                    y = y_new;
                    accepted += 1;
                    rejected_in_row = 0;
                    let vals = rec.guard(t * dir, &y)?;
                    let vals = if cfg.projection {
                        sys.project(&mut y);
                        sys.monitors(&y)?
                    } else {
                        vals
                    };
                    let last = t >= t_end * (1.0 - 1e-14);
                    if accepted % cfg.stride == 0 || last {
                        rec.record(t * dir, &y, vals);
                    }
                } else {
                    rejected_in_row += 1;
                    if rejected_in_row > 50 {
                        return Err(Error::BlowUp {
                            time: t * dir,
                            residual: "step size control".into(),
                            value: err,
                        });
                    }
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= factor;
            }
        }
    }
    Ok(rec.traj)
}

/// Integrates with RK4 to exactly `t_end` and returns only the final state.
pub fn rk4_final(sys: &dyn OdeSystem, y0: &DVector<f64>, h: f64, t_end: f64, project: bool) -> Result<DVector<f64>> {
    let steps = (t_end.abs() / h - 1e-9).ceil().max(0.0) as usize;
    let mut y = y0.clone();
    if steps == 0 {
        return Ok(y);
    }
    let hh = t_end / steps as f64;
    for _ in 0..steps {
        y = rk4_step(sys, &y, hh)?;
        if project {
            sys.project(&mut y);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Harmonic oscillator with a conserved energy monitor.
    struct Oscillator;

    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![y[1], -y[0]]))
        }
        fn state_names(&self) -> Vec<String> {
            vec!["x".into(), "v".into()]
        }
        fn monitor_specs(&self) -> Vec<MonitorSpec> {
            vec![MonitorSpec::integral("energy", 1e-8)]
        }
        fn monitors(&self, y: &DVector<f64>) -> Result<Vec<f64>> {
            Ok(vec![0.5 * (y[0] * y[0] + y[1] * y[1])])
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let y0 = DVector::from_vec(vec![1.0, 0.0]);
        let exact = DVector::from_vec(vec![2.0_f64.cos(), -2.0_f64.sin()]);
        let e1 = (rk4_final(&Oscillator, &y0, 0.1, 2.0, false).unwrap() - &exact).norm();
        let e2 = (rk4_final(&Oscillator, &y0, 0.05, 2.0, false).unwrap() - &exact).norm();
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn dopri_reaches_tolerance_and_endpoint() {
        let cfg = IntegratorConfig {
            method: Method::Rk45,
            h: 0.1,
            atol: 1e-12,
            rtol: 1e-12,
            projection: false,
            t_end: 3.0,
            stride: 1,
        };
        let tr = integrate_system(&Oscillator, &DVector::from_vec(vec![1.0, 0.0]), &cfg).unwrap();
        assert!((tr.times.last().unwrap() - 3.0).abs() < 1e-12);
        let y = tr.last_state();
        assert!((y[0] - 3.0_f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn stride_and_samples() {
        let mut cfg = IntegratorConfig::rk4(0.01, 1.0);
        cfg.stride = 10;
        let tr = integrate_system(&Oscillator, &DVector::from_vec(vec![1.0, 0.0]), &cfg).unwrap();
        assert_eq!(tr.len(), 11);
        assert_eq!(tr.monitor_series("energy").unwrap().len(), 11);
    }

    #[test]
    fn invalid_config() {
        let mut cfg = IntegratorConfig::rk4(0.0, 1.0);
        assert!(cfg.validate().is_err());
        cfg.h = 0.1;
        cfg.stride = 0;
        assert!(cfg.validate().is_err());
    }
}
