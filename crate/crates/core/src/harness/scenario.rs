//! JSON scenario files: parsing, validation of the initial data and runs.
//!
//! ```json
//! {
//!   "name": "chaplygin3d_eps1",
//!   "system": "nonrubber-reduced",
//!   "n": 3,
//!   "geometry": { "sigma": 1.0, "rho": 0.5, "mass": 2.0, "variant": "i" },
//!   "epsilon": 1.0,
//!   "inertia": { "kind": "principal", "moments": [1.0, 2.0, 3.0] },
//!   "initial": { "kind": "explicit", "momentum": [0.1, 0.2, 0.3], "gamma": [0.0, 0.6, 0.8] },
//!   "integrator": { "h": 0.001, "t_end": 10.0 },
//!   "checks": ["energy", "gamma_norm"],
//!   "seed": 1
//! }
//! ```
//!
//! `epsilon` and `d`, when present, override the values derived from
//! `geometry`; without `geometry` both are required.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::integrate::{integrate_system, IntegratorConfig, Trajectory};
use crate::harness::monitor::{monitor_suite, MonitorReport};
use crate::harness::sample::{random_inertia, InertiaFamily};
use crate::harness::systems::{Model, SystemKind, TOL_GAMMA};
use crate::inertia::{GeometryParams, InertiaSpec};
use crate::model::Ball;
use crate::reduced;
use crate::rubber;
use crate::son::{algebra_dim, SkewMatrix, UnitVector};

/// Inertia as written in a scenario; the diagonal families take `D` from the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InertiaConfig {
    Generic { matrix: Vec<Vec<f64>> },
    ChOp { a: Vec<f64> },
    SpecOp { a: Vec<f64> },
    /// n = 3 only: principal moments of the rigid body.
    Principal { moments: [f64; 3] },
    /// Drawn from the scenario seed.
    Random { family: InertiaFamily },
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Exactly one of `momentum` and `velocity`.
    ///
    /// so(n)-valued quantities are vectorized over pairs `i < j`; for the
    /// reduced systems `velocity` is `γ̇` and `momentum` is `p` (or `p̃`).
    Explicit {
        #[serde(default)]
        momentum: Option<Vec<f64>>,
        #[serde(default)]
        velocity: Option<Vec<f64>>,
        gamma: Vec<f64>,
        /// Row-major rotation `g`, `nonrubber-full` only.
        #[serde(default)]
        attitude: Option<Vec<Vec<f64>>>,
    },
    Random {
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub system: SystemKind,
    pub n: usize,
    #[serde(default)]
    pub geometry: Option<GeometryParams>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub d: Option<f64>,
    pub inertia: InertiaConfig,
    pub initial: InitialConfig,
    pub integrator: IntegratorConfig,
    /// Monitor names; empty means every monitor of the system.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub seed: u64,
}

/// Parses a scenario, reporting the path of the offending field.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Error::Config(format!("scenario: {inner}"))
        } else {
            Error::Config(format!("scenario field '{path}': {inner}"))
        }
    })?;
    Ok(sc)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut sc = parse_scenario(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if sc.name.is_empty() {
        sc.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into());
    }
    Ok(sc)
}

fn vector(v: &[f64], len: usize, what: &str) -> Result<DVector<f64>> {
    if v.len() != len {
        return Err(Error::Config(format!("{what} has length {}, expected {len}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{what} has non-finite entries")));
    }
    Ok(DVector::from_column_slice(v))
}

fn square(rows: &[Vec<f64>], len: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != len || rows.iter().any(|r| r.len() != len) {
        return Err(Error::Config(format!("{what} must be a {len}x{len} matrix")));
    }
    Ok(DMatrix::from_fn(len, len, |i, j| rows[i][j]))
}

/// A validated scenario, ready to integrate.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub model: Model,
    pub y0: DVector<f64>,
}

/// Result of [`Scenario::run`].
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub name: String,
    pub system: SystemKind,
    pub n: usize,
    pub epsilon: f64,
    pub d: f64,
    pub trajectory: Trajectory,
    pub report: MonitorReport,
}

impl Scenario {
    /// `(ε, D)` after applying the overrides.
    pub fn parameters(&self) -> Result<(f64, f64)> {
        if let Some(g) = &self.geometry {
            g.validate()?;
        }
        let eps = match (self.epsilon, &self.geometry) {
            (Some(e), _) => e,
            (None, Some(g)) => g.epsilon()?,
            (None, None) => return Err(Error::Config("give either 'geometry' or 'epsilon'".into())),
        };
        let d = match (self.d, &self.geometry) {
            (Some(d), _) => d,
            (None, Some(g)) => g.d(),
            (None, None) => return Err(Error::Config("give either 'geometry' or 'd'".into())),
        };
        Ok((eps, d))
    }

    fn inertia_spec(&self, rng: &mut ChaCha8Rng, d: f64) -> Result<InertiaSpec> {
        let n = self.n;
        let spec = match &self.inertia {
            InertiaConfig::Generic { matrix } => {
                InertiaSpec::generic(&square(matrix, algebra_dim(n), "inertia.matrix")?)?
            }
            InertiaConfig::ChOp { a } => InertiaSpec::ch_op(a.clone(), d)?,
            InertiaConfig::SpecOp { a } => InertiaSpec::spec_op(a.clone(), d)?,
            InertiaConfig::Principal { moments } => {
                if n != 3 {
                    return Err(Error::Config("principal moments need n = 3".into()));
                }
                InertiaSpec::principal_3d(*moments)?
            }
            InertiaConfig::Random { family } => random_inertia(rng, *family, n, d)?,
        };
        let m = spec.n()?;
        if m != n {
            return Err(Error::Config(format!("inertia is for n = {m}, scenario has n = {n}")));
        }
        Ok(spec)
    }

    /// Builds the model and the initial state, checking every constraint residual.
    pub fn prepare(&self) -> Result<Prepared> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {n}")));
        }
        self.integrator.validate()?;
        let (eps, d) = self.parameters()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let spec = self.inertia_spec(&mut rng, d)?;
        let model = Model::new(self.system, Ball::new(spec, eps, d)?)?;
        let y0 = match &self.initial {
            InitialConfig::Random { scale } => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return Err(Error::Config(format!("initial.scale must be non-negative, got {scale}")));
                }
                model.random_state(&mut rng, *scale)?
            }
            InitialConfig::Explicit {
                momentum,
                velocity,
                gamma,
                attitude,
            } => {
                let gamma = vector(gamma, n, "initial.gamma")?;
                let defect = gamma.norm() - 1.0;
                if defect.abs() > TOL_GAMMA {
                    return Err(Error::Invariant(format!(
                        "initial state violates 'gamma_norm' ({:.3e} > {TOL_GAMMA:.0e})",
                        defect.abs()
                    )));
                }
                let gamma = UnitVector::new(gamma)?;
                let attitude = match attitude {
                    None => None,
                    Some(_) if self.system != SystemKind::NonrubberFull => {
                        return Err(Error::Config("initial.attitude applies to nonrubber-full only".into()))
                    }
                    Some(rows) => Some(square(rows, n, "initial.attitude")?),
                };
                let mom = match (momentum, velocity) {
                    (Some(m), None) => {
                        let len = if self.system.algebra_momentum() { algebra_dim(n) } else { n };
                        vector(m, len, "initial.momentum")?
                    }
                    (None, Some(v)) => momentum_from_velocity(&model, v, &gamma)?,
                    _ => {
                        return Err(Error::Config(
                            "initial needs exactly one of 'momentum' and 'velocity'".into(),
                        ))
                    }
                };
                model.pack(&mom, &gamma, attitude.as_ref())?
            }
        };
        model.validate_state(&y0)?;
        Ok(Prepared { model, y0 })
    }

    pub fn run(&self) -> Result<ScenarioRun> {
        let p = self.prepare()?;
        let trajectory = integrate_system(&p.model, &p.y0, &self.integrator)?;
        let report = monitor_suite(&trajectory, &self.checks)?;
        Ok(ScenarioRun {
            name: self.name.clone(),
            system: self.system,
            n: self.n,
            epsilon: p.model.ball().epsilon(),
            d: p.model.ball().d(),
            trajectory,
            report,
        })
    }
}

/// Runs independent scenarios on `pool`, one trajectory per worker; results
/// come back in input order.
pub fn run_scenarios(scenarios: &[Scenario], pool: &rayon::ThreadPool) -> Vec<Result<ScenarioRun>> {
    use rayon::prelude::*;
    pool.install(|| scenarios.par_iter().map(Scenario::run).collect())
}

fn momentum_from_velocity(model: &Model, v: &[f64], gamma: &UnitVector) -> Result<DVector<f64>> {
    let ball = model.ball();
    let n = ball.n();
    if model.kind().algebra_momentum() {
        let omega = SkewMatrix::from_vector(n, &vector(v, algebra_dim(n), "initial.velocity")?)?;
        let m = match model.kind() {
            SystemKind::NonrubberFull | SystemKind::NonrubberReduced => ball.kappa_apply(gamma, &omega),
            SystemKind::Rubber => ball.modified(&omega),
            _ => rubber::mixed_momentum(ball, &omega, gamma),
        };
        return Ok(m.to_vector());
    }
    let gd = vector(v, n, "initial.velocity")?;
    let p = reduced::legendre(ball, gamma, &gd)?;
    if model.kind() == SystemKind::Hamiltonized {
        let a = ball.special_diag().expect("checked by Model::new");
        Ok(p * reduced::multiplier(&a, ball.epsilon(), gamma)?)
    } else {
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "name": "t",
        "system": "nonrubber-reduced",
        "n": 3,
        "epsilon": 1.0,
        "d": 0.5,
        "inertia": { "kind": "principal", "moments": [1.0, 2.0, 3.0] },
        "initial": { "kind": "explicit", "momentum": [0.1, 0.2, 0.3], "gamma": [0.0, 0.6, 0.8] },
        "integrator": { "h": 0.01, "t_end": 0.1 },
        "seed": 1
    }"#;

    fn edit(f: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(BASE).unwrap();
        f(&mut v);
        v.to_string()
    }

    #[test]
    fn base_runs() {
        let sc = parse_scenario(BASE).unwrap();
        let r = sc.run().unwrap();
        assert_eq!(r.trajectory.len(), 11);
        assert!(r.report.passed, "{:?}", r.report);
    }

    #[test]
    fn geometry_and_override() {
        let text = edit(|v| {
            v.as_object_mut().unwrap().remove("epsilon");
            v.as_object_mut().unwrap().remove("d");
            v["geometry"] = serde_json::json!({"sigma": 3.0, "rho": 1.0, "mass": 2.0, "variant": "ii"});
        });
        let sc = parse_scenario(&text).unwrap();
        assert_eq!(sc.parameters().unwrap(), (1.5, 2.0));
        let mut sc2 = sc.clone();
        sc2.epsilon = Some(-1.0);
        assert_eq!(sc2.parameters().unwrap(), (-1.0, 2.0));
        let mut sc3 = sc;
        sc3.geometry = None;
        assert!(sc3.parameters().is_err());
    }

    #[test]
    fn field_diagnostics() {
        let err = parse_scenario(&edit(|v| v["integrator"]["h"] = "x".into())).unwrap_err().to_string();
        assert!(err.contains("integrator.h"), "{err}");
        let err = parse_scenario(&edit(|v| v["bogus"] = 1.into())).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        let err = parse_scenario(&edit(|v| v["system"] = "planar".into())).unwrap_err().to_string();
        assert!(err.contains("system"), "{err}");
        let err = parse_scenario("{\n  \"n\": 3,\n  oops\n}").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn initial_state_validation() {
        let sc = parse_scenario(&edit(|v| v["initial"]["gamma"] = serde_json::json!([0.0, 0.6, 0.81]))).unwrap();
        let err = sc.prepare().unwrap_err().to_string();
        assert!(err.contains("gamma_norm"), "{err}");

        let sc = parse_scenario(&edit(|v| {
            v["system"] = "reduced-generic".into();
            v["initial"]["momentum"] = serde_json::json!([0.0, 0.0, 1.0]);
        }))
        .unwrap();
        let err = sc.prepare().unwrap_err().to_string();
        assert!(err.contains("cotangent"), "{err}");

        // ω = E₁∧E₂ has a horizontal part at γ = (0, 0.6, 0.8)
        let sc = parse_scenario(&edit(|v| {
            v["system"] = "rubber".into();
            v["initial"] = serde_json::json!({"kind": "explicit", "velocity": [1.0, 0.0, 0.0], "gamma": [0.0, 0.6, 0.8]});
        }))
        .unwrap();
        let err = sc.prepare().unwrap_err().to_string();
        assert!(err.contains("twist"), "{err}");

        let sc = parse_scenario(&edit(|v| v["initial"]["velocity"] = serde_json::json!([0.0, 0.0, 1.0]))).unwrap();
        assert!(sc.prepare().unwrap_err().to_string().contains("exactly one"));
    }

    #[test]
    fn velocity_input_for_every_system() {
        // a tangent velocity; for the algebra systems ω = x∧γ is vertical
        let g = [0.0, 0.6, 0.8];
        let x = DVector::from_vec(vec![1.0, 0.3, -0.2]);
        let gamma = UnitVector::new(DVector::from_row_slice(&g)).unwrap();
        let xt = &x - gamma.as_vector() * gamma.dot(&x);
        let omega = crate::son::wedge(&xt, &gamma).unwrap().to_vector();
        for kind in SystemKind::ALL {
            let vel: Vec<f64> = if kind.algebra_momentum() { omega.iter().copied().collect() } else { xt.iter().copied().collect() };
            let text = edit(|v| {
                v["system"] = kind.name().into();
                v["inertia"] = serde_json::json!({"kind": "spec_op", "a": [1.2, 1.5, 2.0]});
                v["initial"] = serde_json::json!({"kind": "explicit", "velocity": vel, "gamma": g});
            });
            let r = parse_scenario(&text).unwrap().run().unwrap();
            assert!(r.report.passed, "{kind}: {:?}", r.report);
        }
    }

    #[test]
    fn random_scenario_is_deterministic() {
        let text = edit(|v| {
            v["system"] = "rubber".into();
            v["n"] = 4.into();
            v["inertia"] = serde_json::json!({"kind": "random", "family": "generic"});
            v["initial"] = serde_json::json!({"kind": "random", "scale": 0.5});
            v["seed"] = 7.into();
        });
        let a = parse_scenario(&text).unwrap().run().unwrap();
        let b = parse_scenario(&text).unwrap().run().unwrap();
        assert_eq!(a.trajectory.states, b.trajectory.states);
    }
}
