//! Linear algebra on so(n).
//!
//! Elements of so(n) are stored as dense `n × n` skew-symmetric matrices. The
//! ordered basis `{E_i ∧ E_j : i < j}` gives a canonical vectorization
//! `X ↦ (X_ij)_{i<j}` which is an isometry for the invariant pairing
//! `⟨X, Y⟩ = −½ tr(XY)`. Linear operators on so(n) (inertia, κ, projections)
//! are represented as `N × N` matrices in that basis, `N = n(n−1)/2`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default tolerance for skew-symmetry checks.
pub const TAU_SKEW: f64 = 1e-12;
/// Default tolerance for unit-norm checks.
pub const TAU_UNIT: f64 = 1e-12;
/// Default tolerance for frame orthonormality.
pub const TAU_FRAME: f64 = 1e-10;

/// Dimension of so(n).
pub fn algebra_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Index pairs `(i, j)`, `i < j`, in basis order.
pub fn basis_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(algebra_dim(n));
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// An element of so(n).
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

impl SkewMatrix {
    /// Antisymmetrizes `m` as `(m − mᵀ)/2`.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "skew matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() < 2 {
            return Err(Error::Dimension("so(n) requires n >= 2".into()));
        }
        let t = m.transpose();
        Ok(SkewMatrix((m - t) * 0.5))
    }

    /// Wraps `m` without antisymmetrizing; fails if `‖m + mᵀ‖_max > tol`.
    pub fn try_from_skew(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let defect = (&m + m.transpose()).amax();
        if defect > tol {
            return Err(Error::Invariant(format!(
                "matrix is not skew-symmetric (defect {defect:.3e})"
            )));
        }
        Self::from_matrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix(DMatrix::zeros(n, n))
    }

    /// The basis element `E_i ∧ E_j`.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        SkewMatrix(m)
    }

    /// Inverse of [`SkewMatrix::to_vector`].
    pub fn from_vector(n: usize, v: &DVector<f64>) -> Result<Self> {
        if v.len() != algebra_dim(n) {
            return Err(Error::Dimension(format!(
                "so({n}) vector must have length {}, got {}",
                algebra_dim(n),
                v.len()
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for (a, (i, j)) in basis_pairs(n).into_iter().enumerate() {
            m[(i, j)] = v[a];
            m[(j, i)] = -v[a];
        }
        Ok(SkewMatrix(m))
    }

    /// Coordinates `(X_ij)_{i<j}` in the basis `E_i ∧ E_j`.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_iterator(
            algebra_dim(n),
            basis_pairs(n).into_iter().map(|(i, j)| self.0[(i, j)]),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        pairing_unchecked(self, self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        SkewMatrix(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        SkewMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        SkewMatrix(&self.0 - &other.0)
    }

    /// Matrix action on a vector.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.0 * x
    }
}

/// A unit vector in ℝⁿ, normalized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector(DVector<f64>);

impl UnitVector {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Invariant("cannot normalize a zero vector".into()));
        }
        Ok(UnitVector(v / norm))
    }

    /// Accepts `v` only if `||v| − 1| ≤ tol`, then renormalizes.
    pub fn checked(v: DVector<f64>, tol: f64) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Invariant(format!(
                "vector is not unit (|v| - 1 = {:.3e})",
                norm - 1.0
            )));
        }
        Self::new(v)
    }

    /// The standard basis vector `E_{k+1}` (zero-based `k`).
    pub fn axis(n: usize, k: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        UnitVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

impl std::ops::Deref for UnitVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Orthonormal frame `e_1, …, e_n` stored as matrix columns, with `e_n = γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthFrame(DMatrix<f64>);

impl OrthFrame {
    /// Validates orthonormality and orientation within `tol`.
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension("frame matrix must be square".into()));
        }
        let defect = orthonormality_defect(&m);
        if defect > tol {
            return Err(Error::Invariant(format!(
                "frame is not orthonormal (defect {defect:.3e})"
            )));
        }
        if m.determinant() < 0.0 {
            return Err(Error::Invariant("frame has negative orientation".into()));
        }
        Ok(OrthFrame(m))
    }

    /// Wraps a matrix that is only approximately orthonormal, such as an
    /// intermediate Runge–Kutta stage.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        OrthFrame(m)
    }

    /// Polar-projects an almost-orthonormal matrix back onto SO(n).
    pub fn reorthonormalize(m: DMatrix<f64>) -> Self {
        OrthFrame(polar_rotation(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.0.column(i).into_owned()
    }

    /// The last column `e_n`.
    pub fn normal(&self) -> DVector<f64> {
        self.column(self.dim() - 1)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Orthonormal basis `e_i ∧ e_j`, `i < j ≤ n−1`, of 𝔥_γ.
    pub fn horizontal_basis(&self) -> Vec<SkewMatrix> {
        let n = self.dim();
        let mut out = Vec::with_capacity(algebra_dim(n - 1));
        for i in 0..n - 1 {
            for j in (i + 1)..n - 1 {
                out.push(wedge_unchecked(&self.column(i), &self.column(j)));
            }
        }
        out
    }

    /// Orthonormal basis `e_i ∧ γ`, `i ≤ n−1`, of 𝔳_γ.
    pub fn vertical_basis(&self) -> Vec<SkewMatrix> {
        let n = self.dim();
        let g = self.normal();
        (0..n - 1)
            .map(|i| wedge_unchecked(&self.column(i), &g))
            .collect()
    }
}

/// `‖EᵀE − Id‖_max`.
pub fn orthonormality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    (m.transpose() * m - DMatrix::<f64>::identity(n, n)).amax()
}

/// Closest rotation to `m` (orthogonal polar factor via SVD).
pub fn polar_rotation(m: DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

/// `x ∧ y = x yᵀ − y xᵀ`.
pub fn wedge(x: &DVector<f64>, y: &DVector<f64>) -> Result<SkewMatrix> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "wedge of vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Dimension("so(n) requires n >= 2".into()));
    }
    Ok(wedge_unchecked(x, y))
}

pub(crate) fn wedge_unchecked(x: &DVector<f64>, y: &DVector<f64>) -> SkewMatrix {
    SkewMatrix(x * y.transpose() - y * x.transpose())
}

/// `⟨X, Y⟩ = −½ tr(XY)`.
pub fn pairing(x: &SkewMatrix, y: &SkewMatrix) -> Result<f64> {
    same_dim(x, y)?;
    Ok(pairing_unchecked(x, y))
}

pub(crate) fn pairing_unchecked(x: &SkewMatrix, y: &SkewMatrix) -> f64 {
    // −½ tr(XY) = ½ Σ_ij X_ij Y_ij for skew X, Y
    0.5 * x.0.component_mul(&y.0).sum()
}

/// `[X, Y] = XY − YX`.
pub fn commutator(x: &SkewMatrix, y: &SkewMatrix) -> Result<SkewMatrix> {
    same_dim(x, y)?;
    Ok(commutator_unchecked(x, y))
}

pub(crate) fn commutator_unchecked(x: &SkewMatrix, y: &SkewMatrix) -> SkewMatrix {
    SkewMatrix(&x.0 * &y.0 - &y.0 * &x.0)
}

/// `Ad_g X = g X gᵀ` for `g ∈ SO(n)`.
pub fn adjoint(g: &DMatrix<f64>, x: &SkewMatrix) -> Result<SkewMatrix> {
    if g.nrows() != x.dim() || g.ncols() != x.dim() {
        return Err(Error::Dimension("rotation and algebra element differ in size".into()));
    }
    let defect = orthonormality_defect(g);
    if defect > TAU_FRAME || g.determinant() < 0.0 {
        return Err(Error::Invariant(format!(
            "adjoint requires a rotation (orthonormality defect {defect:.3e})"
        )));
    }
    Ok(SkewMatrix(g * &x.0 * g.transpose()))
}

/// Orthogonal projection onto 𝔳_γ = ℝⁿ ∧ γ: `X ↦ (Xγ) ∧ γ`.
pub fn proj_v(x: &SkewMatrix, gamma: &UnitVector) -> SkewMatrix {
    let xg = &x.0 * gamma.as_vector();
    wedge_unchecked(&xg, gamma.as_vector())
}

/// Orthogonal projection onto 𝔥_γ, the complement of 𝔳_γ.
pub fn proj_h(x: &SkewMatrix, gamma: &UnitVector) -> SkewMatrix {
    x.sub(&proj_v(x, gamma))
}

/// Matrix of a linear map on so(n) in the vectorized basis.
pub fn operator_matrix(n: usize, f: impl Fn(&SkewMatrix) -> SkewMatrix) -> DMatrix<f64> {
    let pairs = basis_pairs(n);
    let dim = pairs.len();
    let mut out = DMatrix::zeros(dim, dim);
    for (a, &(i, j)) in pairs.iter().enumerate() {
        let col = f(&SkewMatrix::basis(n, i, j)).to_vector();
        out.set_column(a, &col);
    }
    out
}

/// Matrix of `proj_v(·, γ)` in the vectorized basis.
pub fn proj_v_matrix(gamma: &UnitVector) -> DMatrix<f64> {
    operator_matrix(gamma.dim(), |x| proj_v(x, gamma))
}

/// Deterministic positively oriented orthonormal frame with `e_n = γ`.
///
/// Built from the minimal rotation carrying `E_n` to `γ`, written as the
/// Householder reflection along `γ + E_n` composed with a flip of `e_n`. The
/// result is the identity at `γ = E_n` and continuous away from `γ = −E_n`.
pub fn complete_frame(gamma: &UnitVector) -> OrthFrame {
    let n = gamma.dim();
    let g = gamma.as_vector();
    let mut v = g.clone();
    v[n - 1] += 1.0;
    let vv = v.norm_squared();
    let mut m = DMatrix::<f64>::identity(n, n);
    if vv < 1e-24 {
        // γ = −E_n: rotate by π in the (E_1, E_n) plane
        m[(0, 0)] = -1.0;
        m[(n - 1, n - 1)] = -1.0;
        return OrthFrame(m);
    }
    m -= (&v * v.transpose()) * (2.0 / vv);
    // flip e_n so that det = +1 and H·(−E_n) = γ
    for i in 0..n {
        m[(i, n - 1)] = -m[(i, n - 1)];
    }
    OrthFrame(m)
}

fn same_dim(x: &SkewMatrix, y: &SkewMatrix) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "so({}) and so({}) elements",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

/// The isomorphism ℝ³ → so(3): `x ↦ [[0, −x₃, x₂], [x₃, 0, −x₁], [−x₂, x₁, 0]]`.
pub fn hat(x: &[f64; 3]) -> SkewMatrix {
    SkewMatrix(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, -x[2], x[1], x[2], 0.0, -x[0], -x[1], x[0], 0.0],
    ))
}

/// Inverse of [`hat`].
pub fn vee(x: &SkewMatrix) -> Result<[f64; 3]> {
    if x.dim() != 3 {
        return Err(Error::Dimension(format!("vee needs so(3), got so({})", x.dim())));
    }
    let m = x.matrix();
    Ok([m[(2, 1)], m[(0, 2)], m[(1, 0)]])
}

/// Change of basis from the vectorized so(3) basis to hat coordinates:
/// `vec(hat(x)) = P x`.
pub fn hat_basis_matrix() -> DMatrix<f64> {
    // pairs (0,1), (0,2), (1,2) carry −x₃, x₂, −x₁
    DMatrix::from_row_slice(3, 3, &[0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0])
}
