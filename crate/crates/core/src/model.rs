use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::inertia::{apply_matrix, kappa_matrix, solve_spd, GeometryParams, InertiaSpec};
use crate::son::{SkewMatrix, UnitVector};

/// A balanced ball with inertia 𝕀 rolling with parameters `(ε, D)`.
///
/// The dynamics depend on the geometry only through `ε` and `D = mρ²`, so the
/// model stores those two numbers together with the cached operator matrices.
#[derive(Clone, Debug)]
pub struct Ball {
    n: usize,
    spec: InertiaSpec,
    inertia: DMatrix<f64>,
    modified: DMatrix<f64>,
    modified_chol: Cholesky<f64, Dyn>,
    epsilon: f64,
    d: f64,
}

impl Ball {
    pub fn new(spec: InertiaSpec, epsilon: f64, d: f64) -> Result<Self> {
        spec.validate()?;
        if !(epsilon.is_finite() && epsilon != 0.0) {
            return Err(Error::Parameter(format!("epsilon must be finite and nonzero, got {epsilon}")));
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::Parameter(format!("D must be non-negative, got {d}")));
        }
        if let InertiaSpec::ChOp { d: ds, .. } | InertiaSpec::SpecOp { d: ds, .. } = &spec {
            if (ds - d).abs() > 1e-12 * d.abs().max(1.0) {
                return Err(Error::Parameter(format!(
                    "inertia family built with D = {ds} but the ball has D = {d}"
                )));
            }
        }
        let n = spec.n()?;
        let inertia = spec.matrix()?;
        let big = inertia.nrows();
        let modified = &inertia + DMatrix::<f64>::identity(big, big) * d;
        let modified_chol = modified
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Parameter("I + D E is not positive definite".into()))?;
        Ok(Ball {
            n,
            spec,
            inertia,
            modified,
            modified_chol,
            epsilon,
            d,
        })
    }

    pub fn from_geometry(spec: InertiaSpec, geom: &GeometryParams) -> Result<Self> {
        Self::new(spec, geom.epsilon()?, geom.d())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn spec(&self) -> &InertiaSpec {
        &self.spec
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.spec.clone(), epsilon, self.d)
    }

    /// Matrix of 𝕀 in the vectorized basis.
    pub fn inertia_matrix(&self) -> &DMatrix<f64> {
        &self.inertia
    }

    /// Matrix of `𝐈 = 𝕀 + D𝔼`.
    pub fn modified_matrix(&self) -> &DMatrix<f64> {
        &self.modified
    }

    pub fn inertia(&self, omega: &SkewMatrix) -> SkewMatrix {
        apply_matrix(&self.inertia, omega)
    }

    /// `𝐈ω`.
    pub fn modified(&self, omega: &SkewMatrix) -> SkewMatrix {
        apply_matrix(&self.modified, omega)
    }

    /// `𝐈⁻¹m`.
    pub fn modified_inv(&self, m: &SkewMatrix) -> SkewMatrix {
        let v = self.modified_chol.solve(&m.to_vector());
        SkewMatrix::from_vector(self.n, &v).expect("so(n) vector")
    }

    pub fn kappa_matrix(&self, gamma: &UnitVector) -> DMatrix<f64> {
        kappa_matrix(&self.inertia, self.d, gamma)
    }

    /// ω from the contact-point momentum `k = κω`.
    pub fn kappa_solve(&self, gamma: &UnitVector, k: &SkewMatrix) -> Result<SkewMatrix> {
        let w = solve_spd(self.kappa_matrix(gamma), &k.to_vector())?;
        SkewMatrix::from_vector(self.n, &w)
    }

    pub fn kappa_apply(&self, gamma: &UnitVector, omega: &SkewMatrix) -> SkewMatrix {
        apply_matrix(&self.kappa_matrix(gamma), omega)
    }

    /// Diagonal `A = diag(a)` of the special operator, if the inertia is one.
    pub fn special_diag(&self) -> Option<DVector<f64>> {
        match &self.spec {
            InertiaSpec::SpecOp { a, .. } => Some(DVector::from_column_slice(a)),
            _ => None,
        }
    }

    pub(crate) fn check_dim(&self, len: usize, what: &str) -> Result<()> {
        if len != self.n {
            return Err(Error::Dimension(format!(
                "{what} has dimension {len}, model has n = {}",
                self.n
            )));
        }
        Ok(())
    }
}
