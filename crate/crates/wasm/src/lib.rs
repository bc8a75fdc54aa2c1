//! Browser bindings: a 3D rolling trajectory, the reduced invariant density
//! over S², and a live divergence check.
//!
//! Each export returns JSON (or a flat array); the `*_impl` functions carry
//! the logic and are what the native tests exercise.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use chaplygin::harness::measure::{verify_measure, MeasureConfig, MeasureSystem};
use chaplygin::harness::monitor::monitor_suite;
use chaplygin::harness::{integrate_system, IntegratorConfig, Model, SystemKind};
use chaplygin::reduced;
use chaplygin::{Ball, InertiaSpec, UnitVector};

use nalgebra::DVector;

/// Most samples returned to the page per trajectory.
const MAX_POINTS: usize = 2000;

#[derive(Debug, Serialize)]
pub struct Roll3d {
    pub t: Vec<f64>,
    /// `γ` as consecutive `(x, y, z)` triples.
    pub gamma: Vec<f64>,
    pub f4: Vec<f64>,
    pub f4_tilde: Vec<f64>,
    pub energy_drift: f64,
    pub f4_drift: f64,
    pub f4_tilde_drift: f64,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn roll_3d_impl(
    eps: f64,
    d: f64,
    moments: &[f64],
    k: &[f64],
    gamma: &[f64],
    t_end: f64,
    h: f64,
) -> Result<Roll3d, String> {
    if moments.len() != 3 || k.len() != 3 || gamma.len() != 3 {
        return Err("moments, k and gamma need three entries each".into());
    }
    let spec = InertiaSpec::principal_3d([moments[0], moments[1], moments[2]]).map_err(err)?;
    let model = Model::new(SystemKind::NonrubberReduced, Ball::new(spec, eps, d).map_err(err)?).map_err(err)?;
    let g = UnitVector::new(DVector::from_column_slice(gamma)).map_err(err)?;
    let y0 = model.pack(&DVector::from_column_slice(k), &g, None).map_err(err)?;
    let mut cfg = IntegratorConfig::rk4(h, t_end);
    cfg.validate().map_err(err)?;
    cfg.stride = ((t_end / h).ceil() as usize / MAX_POINTS).max(1);
    let tr = integrate_system(&model, &y0, &cfg).map_err(err)?;
    let report = monitor_suite(&tr, &[]).map_err(err)?;
    let drift = |name: &str| report.get(name).map(|c| c.max_abs_drift).unwrap_or(f64::NAN);
    let off = chaplygin::son::algebra_dim(3);
    Ok(Roll3d {
        gamma: tr.states.iter().flat_map(|y| y.rows(off, 3).iter().copied().collect::<Vec<_>>()).collect(),
        f4: tr.monitor_series("f4").unwrap_or_default(),
        f4_tilde: tr.monitor_series("f4_tilde").unwrap_or_default(),
        energy_drift: report.get("energy").map(|c| c.max_rel_drift).unwrap_or(f64::NAN),
        f4_drift: drift("f4"),
        f4_tilde_drift: drift("f4_tilde"),
        t: tr.times,
    })
}

/// Reduced rolling over S² for a 3D ball with principal moments; JSON result.
#[wasm_bindgen]
pub fn roll_3d(
    eps: f64,
    d: f64,
    moments: Vec<f64>,
    k: Vec<f64>,
    gamma: Vec<f64>,
    t_end: f64,
    h: f64,
) -> Result<String, JsError> {
    let r = roll_3d_impl(eps, d, &moments, &k, &gamma, t_end, h).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&r).map_err(|e| JsError::new(&e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct DensityMap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major over colatitude `θ ∈ [0, π]` and longitude `φ ∈ [0, 2π)`.
    pub density: Vec<f64>,
    pub multiplier: Vec<f64>,
    pub jk_coefficient: f64,
}

pub fn density_map_impl(a: &[f64], eps: f64, rows: usize, cols: usize) -> Result<DensityMap, String> {
    if a.len() != 3 {
        return Err("a needs three entries".into());
    }
    if rows < 2 || cols < 1 || rows * cols > 1_000_000 {
        return Err("grid size out of range".into());
    }
    let a = DVector::from_column_slice(a);
    let mut density = Vec::with_capacity(rows * cols);
    let mut multiplier = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let th = std::f64::consts::PI * i as f64 / (rows - 1) as f64;
        for j in 0..cols {
            let ph = 2.0 * std::f64::consts::PI * j as f64 / cols as f64;
            let g = UnitVector::new(DVector::from_vec(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]))
                .map_err(err)?;
            density.push(reduced::density_reduced_special(&a, eps, &g).map_err(err)?);
            multiplier.push(reduced::multiplier(&a, eps, &g).map_err(err)?);
        }
    }
    Ok(DensityMap {
        rows,
        cols,
        density,
        multiplier,
        jk_coefficient: reduced::jk_coefficient(eps).map_err(err)?,
    })
}

/// Invariant density and reducing multiplier of the special reduced system on S²; JSON result.
#[wasm_bindgen]
pub fn density_map(a: Vec<f64>, eps: f64, rows: usize, cols: usize) -> Result<String, JsError> {
    let r = density_map_impl(&a, eps, rows, cols).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&r).map_err(|e| JsError::new(&e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct MeasureResult {
    pub system: String,
    pub max_abs_div: f64,
    pub min_abs_div: f64,
    pub threshold: f64,
    pub negative_control: bool,
    pub passed: bool,
}

pub fn measure_check_impl(system: &str, n: usize, eps: f64, samples: usize, seed: u64) -> Result<MeasureResult, String> {
    let sys = MeasureSystem::parse_list(system).map_err(err)?;
    let [sys] = sys.as_slice() else {
        return Err(format!("'{system}' names more than one system"));
    };
    if !(2..=6).contains(&n) || samples == 0 || samples > 500 {
        return Err("n must be in 2..=6 and samples in 1..=500".into());
    }
    let mut cfg = MeasureConfig::new(*sys);
    cfg.dims = vec![n];
    cfg.epsilons = vec![eps];
    cfg.samples = samples;
    cfg.seed = seed;
    let r = verify_measure(&cfg).map_err(err)?;
    Ok(MeasureResult {
        system: sys.name().into(),
        max_abs_div: r.max_abs_div(),
        min_abs_div: r.min_abs_div(),
        threshold: r.threshold,
        negative_control: *sys == MeasureSystem::NegativeControl,
        passed: r.passed,
    })
}

/// Divergence of `ρf` at random phase points; JSON result.
#[wasm_bindgen]
pub fn measure_check(system: &str, n: usize, eps: f64, samples: usize, seed: u64) -> Result<String, JsError> {
    let r = measure_check_impl(system, n, eps, samples, seed).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&r).map_err(|e| JsError::new(&e.to_string()))
}
