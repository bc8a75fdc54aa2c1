//! Rolling without slipping and twisting.
//!
//! The constrained flow is written with a Lagrange multiplier `λ₀ ∈ 𝔥_γ`
//! computed in a moving orthonormal frame, and alternatively through the
//! mixed momentum `𝐦 = pr_{𝔳_γ}𝐈ω + pr_{𝔥_γ}ω`, which needs no frame.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::inertia::restricted_gram;
use crate::model::Ball;
use crate::son::{
    commutator_unchecked, complete_frame, hat, hat_basis_matrix, orthonormality_defect, pairing_unchecked,
    proj_h, proj_v, proj_v_matrix, OrthFrame, SkewMatrix, UnitVector,
};

/// Default tolerance for the no-twist residual.
pub const TAU_TWIST: f64 = 1e-8;

/// Relative twist under which the projections leave the momentum alone.
pub const TWIST_PROJECT_BELOW: f64 = 1e-13;

/// Orthonormality defect under which the frame is not re-orthonormalized.
pub const FRAME_PROJECT_BELOW: f64 = 1e-14;

/// State `(m, e₁, …, e_n)` with `m = 𝐈ω` and `e_n = γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RubberState {
    pub m: SkewMatrix,
    pub frame: OrthFrame,
}

impl RubberState {
    /// Builds a state and checks the no-twist condition `pr_{𝔥_γ}𝐈⁻¹m = 0`.
    pub fn new(ball: &Ball, m: SkewMatrix, frame: OrthFrame) -> Result<Self> {
        ball.check_dim(m.dim(), "m")?;
        ball.check_dim(frame.dim(), "frame")?;
        let s = RubberState { m, frame };
        let twist = twist_residual(ball, &s);
        if twist > TAU_TWIST {
            return Err(Error::Invariant(format!(
                "no-twist residual {twist:.3e} exceeds {TAU_TWIST:.0e}"
            )));
        }
        Ok(s)
    }

    /// Admissible state with angular velocity `ω = x ∧ γ`.
    pub fn from_velocity(ball: &Ball, x: &DVector<f64>, gamma: &UnitVector) -> Result<Self> {
        let omega = crate::son::wedge(x, gamma)?;
        Self::new(ball, ball.modified(&omega), complete_frame(gamma))
    }

    pub fn gamma(&self) -> UnitVector {
        UnitVector::new(self.frame.normal()).expect("frame column is unit")
    }
}

/// `‖pr_{𝔥_γ} ω‖`.
pub fn twist_residual(ball: &Ball, state: &RubberState) -> f64 {
    let omega = ball.modified_inv(&state.m);
    proj_h(&omega, &state.gamma()).norm()
}

/// `φ_ij = ⟨ω, e_i ∧ e_j⟩`, `i < j ≤ n−1`.
pub fn no_twist_functions(ball: &Ball, state: &RubberState) -> Vec<f64> {
    let omega = ball.modified_inv(&state.m);
    state
        .frame
        .horizontal_basis()
        .iter()
        .map(|h| pairing_unchecked(&omega, h))
        .collect()
}

/// Multiplier `λ₀ = Σ λ^{ij} e_i∧e_j` keeping `ω` in 𝔳_γ, computed in `frame`.
pub fn lambda0_in_frame(ball: &Ball, m: &SkewMatrix, frame: &OrthFrame) -> Result<SkewMatrix> {
    let n = ball.n();
    let basis = frame.horizontal_basis();
    if basis.is_empty() {
        return Ok(SkewMatrix::zeros(n));
    }
    let omega = ball.modified_inv(m);
    let drift = ball.modified_inv(&commutator_unchecked(m, &omega));
    let inv_basis: Vec<SkewMatrix> = basis.iter().map(|b| ball.modified_inv(b)).collect();
    let a = DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        pairing_unchecked(&basis[i], &inv_basis[j])
    });
    let rhs = DVector::from_iterator(
        basis.len(),
        basis.iter().map(|b| -pairing_unchecked(b, &drift)),
    );
    let coeffs = a
        .cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::Singular("multiplier matrix A is not positive definite".into()))?;
    Ok(basis
        .iter()
        .zip(coeffs.iter())
        .fold(SkewMatrix::zeros(n), |acc, (b, c)| acc.add(&b.scale(*c))))
}

/// `λ₀` at `(m, γ)`, using the canonical frame.
pub fn lambda0_solve(ball: &Ball, m: &SkewMatrix, gamma: &UnitVector) -> Result<SkewMatrix> {
    ball.check_dim(m.dim(), "m")?;
    ball.check_dim(gamma.dim(), "γ")?;
    lambda0_in_frame(ball, m, &complete_frame(gamma))
}

/// The matrix `𝐀_{ij,kl} = ⟨e_i∧e_j, 𝐈⁻¹ e_k∧e_l⟩`.
pub fn multiplier_matrix(ball: &Ball, frame: &OrthFrame) -> DMatrix<f64> {
    let inv = ball
        .modified_matrix()
        .clone()
        .try_inverse()
        .expect("modified inertia is positive definite");
    restricted_gram(&inv, &frame.horizontal_basis())
}

/// Time derivatives of a [`RubberState`].
#[derive(Clone, Debug)]
pub struct RubberRates {
    pub m_dot: SkewMatrix,
    pub gamma_dot: DVector<f64>,
    /// `ė_i = −εωe_i` as matrix columns.
    pub frame_dot: DMatrix<f64>,
}

/// `ṁ = [m, ω] + λ₀`, `ė_i = −εωe_i`.
pub fn rubber_field(ball: &Ball, state: &RubberState) -> Result<RubberRates> {
    let omega = ball.modified_inv(&state.m);
    let lambda = lambda0_in_frame(ball, &state.m, &state.frame)?;
    let frame_dot = omega.matrix() * state.frame.matrix() * (-ball.epsilon());
    let n = ball.n();
    Ok(RubberRates {
        m_dot: commutator_unchecked(&state.m, &omega).add(&lambda),
        gamma_dot: frame_dot.column(n - 1).into_owned(),
        frame_dot,
    })
}

/// `½⟨m, ω⟩`.
pub fn rubber_energy(ball: &Ball, m: &SkewMatrix) -> f64 {
    0.5 * pairing_unchecked(m, &ball.modified_inv(m))
}

/// Restores the constraints after a discrete step: polar re-orthonormalization
/// of the frame and `m ← m − 𝐈 pr_{𝔥_γ}(𝐈⁻¹m)`.
pub fn project_rubber(ball: &Ball, m: &SkewMatrix, frame: DMatrix<f64>) -> RubberState {
    // projecting away rounding-level residuals every step biases the energy
    // (the projectors themselves carry an |γ|² − 1 error), so small ones stay
    let frame = if orthonormality_defect(&frame) > FRAME_PROJECT_BELOW {
        OrthFrame::reorthonormalize(frame)
    } else {
        OrthFrame::from_matrix_unchecked(frame)
    };
    let gamma = UnitVector::new(frame.normal()).expect("unit normal");
    let omega = ball.modified_inv(m);
    let twist = proj_h(&omega, &gamma);
    if twist.norm() <= TWIST_PROJECT_BELOW * omega.norm() {
        return RubberState { m: m.clone(), frame };
    }
    RubberState {
        m: m.sub(&ball.modified(&twist)),
        frame,
    }
}

/// State `(𝐦, γ)` of the extended momentum formulation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtMomentumState {
    pub mm: SkewMatrix,
    pub gamma: UnitVector,
}

/// `𝐦 = pr_{𝔳_γ}𝐈ω + pr_{𝔥_γ}ω`.
pub fn mixed_momentum(ball: &Ball, omega: &SkewMatrix, gamma: &UnitVector) -> SkewMatrix {
    proj_v(&ball.modified(omega), gamma).add(&proj_h(omega, gamma))
}

/// Inverts [`mixed_momentum`] by a dense solve.
pub fn omega_from_mixed(ball: &Ball, mm: &SkewMatrix, gamma: &UnitVector) -> Result<SkewMatrix> {
    ball.check_dim(mm.dim(), "𝐦")?;
    ball.check_dim(gamma.dim(), "γ")?;
    let pv = proj_v_matrix(gamma);
    let big = pv.nrows();
    let map = &pv * ball.modified_matrix() + (DMatrix::<f64>::identity(big, big) - &pv);
    let w = map
        .lu()
        .solve(&mm.to_vector())
        .ok_or_else(|| Error::Singular("momentum recovery map is singular".into()))?;
    SkewMatrix::from_vector(ball.n(), &w)
}

/// `𝐦̇ = ε[𝐦, ω] + (1 − ε) pr_{𝔳_γ}[𝐈ω, ω]`, `γ̇ = −εωγ`.
pub fn ext_momentum_field(ball: &Ball, state: &ExtMomentumState) -> Result<(SkewMatrix, DVector<f64>)> {
    let eps = ball.epsilon();
    let omega = omega_from_mixed(ball, &state.mm, &state.gamma)?;
    let io = ball.modified(&omega);
    let mm_dot = commutator_unchecked(&state.mm, &omega)
        .scale(eps)
        .add(&proj_v(&commutator_unchecked(&io, &omega), &state.gamma).scale(1.0 - eps));
    Ok((mm_dot, omega.apply(&state.gamma) * (-eps)))
}

/// Vector form for `n = 3`: `ṁ = m × ω + λγ`, `γ̇ = εγ × ω`.
///
/// `λ = −(γ, 𝐈⁻¹(m × ω)) / (γ, 𝐈⁻¹γ)` keeps `(γ, ω)` constant.
pub fn rubber_field_3d(ball: &Ball, m: &[f64; 3], gamma: &[f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    if ball.n() != 3 {
        return Err(Error::Dimension(format!("rubber_field_3d needs n = 3, got {}", ball.n())));
    }
    let p = hat_basis_matrix();
    let big = p.transpose() * ball.modified_matrix() * &p;
    let inv = big
        .try_inverse()
        .ok_or_else(|| Error::Singular("modified inertia is singular".into()))?;
    let mv = DVector::from_column_slice(m);
    let g = DVector::from_column_slice(gamma);
    let w = &inv * &mv;
    let mxw = mv.cross(&w);
    let lam = -g.dot(&(&inv * &mxw)) / g.dot(&(&inv * &g));
    let m_dot = mxw + &g * lam;
    let g_dot = g.cross(&w) * ball.epsilon();
    Ok(([m_dot[0], m_dot[1], m_dot[2]], [g_dot[0], g_dot[1], g_dot[2]]))
}

/// Angular velocity of the vector form, for the `(γ, ω)` monitor.
pub fn omega_3d(ball: &Ball, m: &[f64; 3]) -> Result<[f64; 3]> {
    crate::son::vee(&ball.modified_inv(&hat(m)))
}
