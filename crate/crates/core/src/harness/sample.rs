//! Random phase points and inertia operators for property checks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inertia::InertiaSpec;
use crate::son::{algebra_dim, UnitVector};

/// Family of randomly drawn inertia operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InertiaFamily {
    Generic,
    ChOp,
    SpecOp,
}

impl std::str::FromStr for InertiaFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(InertiaFamily::Generic),
            "ch_op" | "ch-op" => Ok(InertiaFamily::ChOp),
            "spec_op" | "spec-op" => Ok(InertiaFamily::SpecOp),
            _ => Err(Error::Config(format!(
                "unknown inertia family '{s}' (expected generic, ch_op or spec_op)"
            ))),
        }
    }
}

pub fn gaussian(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniformly distributed point of S^{n−1}.
pub fn random_unit(rng: &mut impl Rng, n: usize) -> UnitVector {
    loop {
        if let Ok(u) = UnitVector::new(gaussian(rng, n)) {
            return u;
        }
    }
}

/// Gaussian tangent vector at γ.
pub fn random_tangent(rng: &mut impl Rng, gamma: &UnitVector, scale: f64) -> DVector<f64> {
    let v = gaussian(rng, gamma.dim()) * scale;
    &v - gamma.as_vector() * gamma.dot(&v)
}

/// Haar-distributed rotation (QR of a Gaussian matrix with sign fix).
pub fn random_rotation(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut c = q.column_mut(j);
            c *= -1.0;
        }
    }
    if q.determinant() < 0.0 {
        let mut c = q.column_mut(0);
        c *= -1.0;
    }
    q
}

/// Random inertia of the given family, compatible with `D`.
///
/// * generic: `𝕀 = QQᵀ/N + c·Id` with `c ∈ [0.5, 1.5]`;
/// * ChOp: `a_i ∈ √D·[0.3, 0.95]`, so that `a_i a_j < D`;
/// * SpecOp: `a_i ∈ a₀·[1, 3]` with `a₀ = √D + 0.5`, so that `a_i a_j > D`.
pub fn random_inertia(rng: &mut impl Rng, family: InertiaFamily, n: usize, d: f64) -> Result<InertiaSpec> {
    match family {
        InertiaFamily::Generic => {
            let big = algebra_dim(n);
            let q = DMatrix::from_fn(big, big, |_, _| rng.sample::<f64, _>(StandardNormal));
            let c = rng.random_range(0.5..1.5);
            let m = &q * q.transpose() / big as f64 + DMatrix::identity(big, big) * c;
            InertiaSpec::generic(&m)
        }
        InertiaFamily::ChOp => {
            if !(d > 0.0) {
                return Err(Error::Parameter("ChOp inertia needs D > 0".into()));
            }
            let a = (0..n).map(|_| d.sqrt() * rng.random_range(0.3..0.95)).collect();
            InertiaSpec::ch_op(a, d)
        }
        InertiaFamily::SpecOp => {
            let a0 = d.sqrt() + 0.5;
            let a = (0..n).map(|_| a0 * rng.random_range(1.0..3.0)).collect();
            InertiaSpec::spec_op(a, d)
        }
    }
}

/// SpecOp inertia with `a_i` evenly spaced in `a₀·[1, 3]`, `a₀ = √D + 0.5`.
pub fn anisotropic_spec_op(n: usize, d: f64) -> Result<InertiaSpec> {
    let a0 = d.sqrt() + 0.5;
    let a = (0..n)
        .map(|i| a0 * (1.0 + 2.0 * i as f64 / (n.max(2) - 1) as f64))
        .collect();
    InertiaSpec::spec_op(a, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::son::orthonormality_defect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotations_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..6 {
            let q = random_rotation(&mut rng, n);
            assert!(orthonormality_defect(&q) < 1e-13);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_inertia_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 3..6 {
            for fam in [InertiaFamily::Generic, InertiaFamily::ChOp, InertiaFamily::SpecOp] {
                let spec = random_inertia(&mut rng, fam, n, 0.8).unwrap();
                spec.validate().unwrap();
                assert_eq!(spec.n().unwrap(), n);
            }
        }
    }

    #[test]
    fn tangent_is_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_unit(&mut rng, 5);
        assert!(random_tangent(&mut rng, &g, 2.0).dot(&g).abs() < 1e-14);
    }
}
