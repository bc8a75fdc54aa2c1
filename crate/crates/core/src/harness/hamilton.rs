//! Pointwise check of the time-rescaled Hamiltonian form on random states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::sample::{random_inertia, random_tangent, random_unit, InertiaFamily};
use crate::reduced::{self, CotangentState};

pub const TOL_HAMILTONIZATION: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonizationConfig {
    pub dims: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub samples: usize,
    pub d: f64,
    /// Size of the random momenta.
    pub scale: f64,
    pub seed: u64,
}

impl Default for HamiltonizationConfig {
    fn default() -> Self {
        HamiltonizationConfig {
            dims: vec![3, 4, 5],
            epsilons: vec![-1.0, 0.3, 0.5, 1.0, 2.0],
            samples: 200,
            d: 0.7,
            scale: 1.0,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonizationRow {
    pub n: usize,
    pub epsilon: f64,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonizationReport {
    pub samples: usize,
    pub threshold: f64,
    pub rows: Vec<HamiltonizationRow>,
    pub passed: bool,
}

impl HamiltonizationReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

/// One random SpecOp inertia per `(n, ε)` and `samples` random states each.
pub fn verify_hamiltonization_batch(cfg: &HamiltonizationConfig) -> Result<HamiltonizationReport> {
    if cfg.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.dims {
        if n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {n}")));
        }
        for &eps in &cfg.epsilons {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((n as u64) << 32) ^ eps.to_bits());
            let spec = random_inertia(&mut rng, InertiaFamily::SpecOp, n, cfg.d)?;
            let a = nalgebra::DVector::from_column_slice(spec.diagonal_params().expect("spec_op"));
            let states: Vec<CotangentState> = (0..cfg.samples)
                .map(|_| {
                    let g = random_unit(&mut rng, n);
                    CotangentState::projected(random_tangent(&mut rng, &g, cfg.scale), g)
                })
                .collect();
            let res = states
                .par_iter()
                .map(|s| reduced::verify_hamiltonization(&a, eps, s))
                .collect::<Result<Vec<_>>>()?;
            rows.push(HamiltonizationRow {
                n,
                epsilon: eps,
                max_residual: res.into_iter().fold(0.0, f64::max),
            });
        }
    }
    let passed = rows.iter().all(|r| r.max_residual < TOL_HAMILTONIZATION);
    Ok(HamiltonizationReport {
        samples: cfg.samples,
        threshold: TOL_HAMILTONIZATION,
        rows,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batch_passes() {
        let cfg = HamiltonizationConfig {
            samples: 10,
            ..Default::default()
        };
        let r = verify_hamiltonization_batch(&cfg).unwrap();
        assert_eq!(r.rows.len(), 15);
        assert!(r.passed, "{:?}", r.rows);
    }
}
