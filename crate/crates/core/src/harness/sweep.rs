//! Grid runs over `ε` and the inertia, one trajectory per worker.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::integrate::{integrate_system, IntegratorConfig};
use crate::harness::monitor::{monitor_suite, CheckStatus};
use crate::harness::sample::{random_inertia, InertiaFamily};
use crate::harness::systems::{Model, SystemKind};
use crate::inertia::InertiaSpec;
use crate::model::Ball;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CHAPLYGIN_WORKERS";

/// Worker count from [`WORKERS_ENV`]; `None` when unset or empty.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(Some(w)),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

pub type Pool = rayon::ThreadPool;

/// Thread pool with `workers` threads (rayon's default when `None`).
pub fn worker_pool(workers: Option<usize>) -> Result<Pool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub system: SystemKind,
    pub n: usize,
    pub epsilons: Vec<f64>,
    /// Explicit diagonal parameters `a` (ch_op or spec_op family); when empty,
    /// `random_inertias` operators are drawn from `family`.
    pub a_grid: Vec<Vec<f64>>,
    pub random_inertias: usize,
    pub family: InertiaFamily,
    pub d: f64,
    pub scale: f64,
    pub integrator: IntegratorConfig,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(system: SystemKind, n: usize, epsilons: Vec<f64>) -> Self {
        SweepConfig {
            system,
            n,
            epsilons,
            a_grid: Vec::new(),
            random_inertias: 2,
            family: InertiaFamily::SpecOp,
            d: 0.7,
            scale: 1.0,
            integrator: IntegratorConfig::rk4(1e-3, 1.0),
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub inertia_index: usize,
    pub passed: bool,
    pub energy_rel_drift: f64,
    /// Worst checked quantity relative to its tolerance.
    pub worst_check: String,
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub system: SystemKind,
    pub n: usize,
    pub rows: Vec<SweepRow>,
    pub passed: bool,
}

fn grid_inertias(cfg: &SweepConfig) -> Result<Vec<InertiaSpec>> {
    if !cfg.a_grid.is_empty() {
        return cfg
            .a_grid
            .iter()
            .map(|a| {
                if a.len() != cfg.n {
                    return Err(Error::Config(format!("a = {a:?} has length {}, expected {}", a.len(), cfg.n)));
                }
                match cfg.family {
                    InertiaFamily::ChOp => InertiaSpec::ch_op(a.clone(), cfg.d),
                    InertiaFamily::SpecOp => InertiaSpec::spec_op(a.clone(), cfg.d),
                    InertiaFamily::Generic => Err(Error::Config("an explicit a-grid needs ch_op or spec_op".into())),
                }
            })
            .collect();
    }
    if cfg.random_inertias == 0 {
        return Err(Error::Config("sweep needs a nonempty inertia grid".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.random_inertias)
        .map(|_| random_inertia(&mut rng, cfg.family, cfg.n, cfg.d))
        .collect()
}

fn run_point(cfg: &SweepConfig, spec: &InertiaSpec, eps: f64, index: usize) -> Result<SweepRow> {
    let model = Model::new(cfg.system, Ball::new(spec.clone(), eps, cfg.d)?)?;
    let seed = cfg.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ eps.to_bits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y0 = model.random_state(&mut rng, cfg.scale)?;
    let row = |passed, energy, worst: &str, ratio| SweepRow {
        epsilon: eps,
        inertia_index: index,
        passed,
        energy_rel_drift: energy,
        worst_check: worst.into(),
        worst_ratio: ratio,
    };
    let traj = match integrate_system(&model, &y0, &cfg.integrator) {
        Ok(t) => t,
        Err(Error::BlowUp { residual, .. }) => return Ok(row(false, f64::NAN, &residual, f64::INFINITY)),
        Err(e) => return Err(e),
    };
    let report = monitor_suite(&traj, &[])?;
    let energy = report.get("energy").map(|c| c.max_rel_drift).unwrap_or(f64::NAN);
    let (worst, ratio) = report
        .checks
        .iter()
        .filter(|c| c.status != CheckStatus::Reported)
        .map(|c| (c.name.as_str(), c.judged() / c.tolerance))
        .fold(("", 0.0), |acc, x| if x.1 > acc.1 || x.1.is_nan() { x } else { acc });
    Ok(row(report.passed, energy, worst, ratio))
}

/// Runs every `(ε, inertia)` combination on `pool`; rows come back in grid order.
pub fn run_sweep(cfg: &SweepConfig, pool: &rayon::ThreadPool) -> Result<SweepReport> {
    if cfg.epsilons.is_empty() {
        return Err(Error::Config("sweep needs at least one epsilon".into()));
    }
    cfg.integrator.validate()?;
    let inertias = grid_inertias(cfg)?;
    let grid: Vec<(f64, usize)> = cfg
        .epsilons
        .iter()
        .flat_map(|&e| (0..inertias.len()).map(move |i| (e, i)))
        .collect();
    let rows = pool.install(|| {
        grid.par_iter()
            .map(|&(eps, i)| run_point(cfg, &inertias[i], eps, i))
            .collect::<Result<Vec<_>>>()
    })?;
    let passed = rows.iter().all(|r| r.passed);
    Ok(SweepReport {
        system: cfg.system,
        n: cfg.n,
        rows,
        passed,
    })
}
