//! Rolling without slipping: the full system on `T*SO(n) × S^{n−1}`, its
//! reduction to `so(n)* × S^{n−1}`, fixed-frame diagnostics and the
//! three-dimensional integrals.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::inertia::{solve_spd, GeometryParams};
use crate::model::Ball;
use crate::son::{
    commutator_unchecked, pairing_unchecked, vee, wedge_unchecked, SkewMatrix, UnitVector,
    TAU_FRAME,
};

/// State `(k, γ)` of the reduced problem, optionally with the attitude `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallState {
    /// Angular momentum relative to the contact point.
    pub k: SkewMatrix,
    pub gamma: UnitVector,
    pub attitude: Option<DMatrix<f64>>,
}

impl BallState {
    pub fn reduced(k: SkewMatrix, gamma: UnitVector) -> Result<Self> {
        if k.dim() != gamma.dim() {
            return Err(Error::Dimension("k and γ dimensions differ".into()));
        }
        Ok(BallState {
            k,
            gamma,
            attitude: None,
        })
    }

    pub fn full(k: SkewMatrix, gamma: UnitVector, g: DMatrix<f64>) -> Result<Self> {
        let mut s = Self::reduced(k, gamma)?;
        if g.nrows() != s.k.dim() || g.ncols() != s.k.dim() {
            return Err(Error::Dimension("attitude has the wrong size".into()));
        }
        let defect = crate::son::orthonormality_defect(&g);
        if defect > TAU_FRAME || g.determinant() < 0.0 {
            return Err(Error::Invariant(format!(
                "attitude is not a rotation (defect {defect:.3e})"
            )));
        }
        s.attitude = Some(g);
        Ok(s)
    }
}

/// Time derivatives of the reduced state.
#[derive(Clone, Debug)]
pub struct ReducedRates {
    pub k_dot: SkewMatrix,
    pub gamma_dot: DVector<f64>,
}

/// Time derivatives of the full state.
#[derive(Clone, Debug)]
pub struct FullRates {
    pub k_dot: SkewMatrix,
    pub g_dot: DMatrix<f64>,
    pub gamma_dot: DVector<f64>,
}

/// Angular velocity in the body frame, `ω = κ⁻¹k`.
pub fn angular_velocity(ball: &Ball, k: &SkewMatrix, gamma: &UnitVector) -> Result<SkewMatrix> {
    ball.check_dim(k.dim(), "k")?;
    ball.check_dim(gamma.dim(), "γ")?;
    ball.kappa_solve(gamma, k)
}

/// `k̇ = [k, ω]`, `γ̇ = −εωγ`.
pub fn reduced_field(ball: &Ball, k: &SkewMatrix, gamma: &UnitVector) -> Result<ReducedRates> {
    let omega = angular_velocity(ball, k, gamma)?;
    Ok(ReducedRates {
        k_dot: commutator_unchecked(k, &omega),
        gamma_dot: omega.apply(gamma) * (-ball.epsilon()),
    })
}

/// Adds `ġ = gω` to the reduced field.
pub fn full_field(ball: &Ball, state: &BallState) -> Result<FullRates> {
    let g = state
        .attitude
        .as_ref()
        .ok_or_else(|| Error::Invariant("full field needs the attitude g".into()))?;
    let omega = angular_velocity(ball, &state.k, &state.gamma)?;
    Ok(FullRates {
        k_dot: commutator_unchecked(&state.k, &omega),
        g_dot: g * omega.matrix(),
        gamma_dot: omega.apply(&state.gamma) * (-ball.epsilon()),
    })
}

/// Kinetic energy `½⟨κω, ω⟩ = ½⟨k, ω⟩`.
pub fn energy(ball: &Ball, k: &SkewMatrix, gamma: &UnitVector) -> Result<f64> {
    let omega = angular_velocity(ball, k, gamma)?;
    Ok(0.5 * pairing_unchecked(k, &omega))
}

/// `ω̇` along the reduced flow, from `κ̇ω + κω̇ = k̇`.
pub fn angular_acceleration(ball: &Ball, k: &SkewMatrix, gamma: &UnitVector) -> Result<SkewMatrix> {
    let omega = angular_velocity(ball, k, gamma)?;
    let k_dot = commutator_unchecked(k, &omega);
    let gamma_dot = omega.apply(gamma) * (-ball.epsilon());
    let kappa_dot_omega = proj_v_rate(&omega, gamma, &gamma_dot).scale(ball.d());
    let rhs = k_dot.sub(&kappa_dot_omega).to_vector();
    let w = solve_spd(ball.kappa_matrix(gamma), &rhs)?;
    SkewMatrix::from_vector(ball.n(), &w)
}

/// Derivative of `pr_{𝔳_γ}X` for fixed `X` when γ moves with velocity `γ̇`.
pub(crate) fn proj_v_rate(x: &SkewMatrix, gamma: &DVector<f64>, gamma_dot: &DVector<f64>) -> SkewMatrix {
    wedge_unchecked(&x.apply(gamma_dot), gamma).add(&wedge_unchecked(&x.apply(gamma), gamma_dot))
}

/// Fixed-frame quantities reconstructed from a full state.
#[derive(Clone, Debug)]
pub struct FixedFrameDiag {
    /// Centre position `𝐫 = (σ ± ρ) gγ`.
    pub position: DVector<f64>,
    /// Centre velocity `𝐕 = ±ρ Ω Γ`.
    pub velocity: DVector<f64>,
    /// Fixed-frame angular momentum `M = Ad_g(𝕀ω)`.
    pub momentum: SkewMatrix,
    /// Constraint reaction `Λ`.
    pub reaction: DVector<f64>,
    /// `Ω = Ad_g ω`.
    pub omega_fixed: SkewMatrix,
    /// `Γ = gγ`.
    pub normal_fixed: DVector<f64>,
}

pub fn diag_fixed_frame(ball: &Ball, geom: &GeometryParams, state: &BallState) -> Result<FixedFrameDiag> {
    let g = state
        .attitude
        .as_ref()
        .ok_or_else(|| Error::Invariant("fixed-frame diagnostics need the attitude g".into()))?;
    let eps = geom.epsilon()?;
    if (eps - ball.epsilon()).abs() > 1e-12 * eps.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "geometry gives epsilon = {eps} but the model uses {}",
            ball.epsilon()
        )));
    }
    let sign = geom.sign();
    let omega = angular_velocity(ball, &state.k, &state.gamma)?;
    let omega_dot = angular_acceleration(ball, &state.k, &state.gamma)?;
    let gt = g.transpose();
    let big_omega = SkewMatrix::from_matrix(g * omega.matrix() * &gt)?;
    let big_omega_dot = SkewMatrix::from_matrix(g * omega_dot.matrix() * &gt)?;
    let normal = g * state.gamma.as_vector();
    let normal_dot = big_omega.apply(&normal) * (sign * geom.rho / geom.center_distance());
    let reaction = (big_omega_dot.apply(&normal) + big_omega.apply(&normal_dot))
        * (sign * geom.mass * geom.rho);
    let momentum = SkewMatrix::from_matrix(g * ball.inertia(&omega).matrix() * &gt)?;
    Ok(FixedFrameDiag {
        position: &normal * geom.center_distance(),
        velocity: big_omega.apply(&normal) * (sign * geom.rho),
        momentum,
        reaction,
        omega_fixed: big_omega,
        normal_fixed: normal,
    })
}

/// First integrals of the three-dimensional problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrals3d {
    /// `(γ, γ)`.
    pub f1: f64,
    /// `½(k, ω)`.
    pub f2: f64,
    /// `(k, k)`.
    pub f3: f64,
    /// `(k, γ)`, an integral only for `ε = 1`.
    pub f4: f64,
    /// `Σ (I₂ + I₃ − I₁ + D) k₁γ₁ + …`, an integral for `ε = −1`.
    pub f4_tilde: f64,
}

/// Principal moments `(I₁, I₂, I₃)` when 𝕀 is diagonal in the ℝ³ picture.
pub fn principal_moments(ball: &Ball) -> Result<[f64; 3]> {
    if ball.n() != 3 {
        return Err(Error::Dimension(format!("principal moments need n = 3, got {}", ball.n())));
    }
    let p = crate::son::hat_basis_matrix();
    let m3 = p.transpose() * ball.inertia_matrix() * &p;
    let off = m3.iter().enumerate().filter(|(i, _)| i % 4 != 0).map(|(_, v)| v.abs()).fold(0.0, f64::max);
    if off > 1e-12 * m3.amax() {
        return Err(Error::Parameter("inertia is not diagonal in the body axes".into()));
    }
    Ok([m3[(0, 0)], m3[(1, 1)], m3[(2, 2)]])
}

pub fn integrals_3d(ball: &Ball, k: &SkewMatrix, gamma: &UnitVector) -> Result<Integrals3d> {
    if ball.n() != 3 || k.dim() != 3 || gamma.dim() != 3 {
        return Err(Error::Dimension("the classical integrals are defined for n = 3".into()));
    }
    let moments = principal_moments(ball)?;
    let omega = vee(&angular_velocity(ball, k, gamma)?)?;
    let kv = vee(k)?;
    let g = gamma.as_vector();
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let gv = [g[0], g[1], g[2]];
    let [i1, i2, i3] = moments;
    let d = ball.d();
    let coef = [i2 + i3 - i1 + d, i3 + i1 - i2 + d, i1 + i2 - i3 + d];
    Ok(Integrals3d {
        f1: g.norm_squared(),
        f2: 0.5 * dot(&kv, &omega),
        f3: dot(&kv, &kv),
        f4: dot(&kv, &gv),
        f4_tilde: (0..3).map(|i| coef[i] * kv[i] * gv[i]).sum(),
    })
}
