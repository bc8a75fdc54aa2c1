//! The rubber ball reduced by SO(n) to the cotangent bundle of the sphere.
//!
//! States are pairs `(p, γ)` in ℝ²ⁿ with `(γ, γ) = 1`, `(γ, p) = 0`.
//! Functions taking a [`Ball`] work for any inertia; functions taking the
//! diagonal `a` assume the special operator `𝐈(x ∧ y) = Ax ∧ Ay`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::inertia::{vertical_det, GeometryParams};
use crate::model::Ball;
use crate::son::{
    complete_frame, pairing_unchecked, wedge_unchecked, SkewMatrix, UnitVector,
};

/// Tolerance for `(γ, p) = 0` and tangency of velocities.
pub const TAU_COT: f64 = 1e-10;

/// A point `(p, γ)` of T*S^{n−1}.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentState {
    pub p: DVector<f64>,
    pub gamma: UnitVector,
}

impl CotangentState {
    pub fn new(p: DVector<f64>, gamma: UnitVector) -> Result<Self> {
        check_tangent(&p, &gamma, "p")?;
        Ok(CotangentState { p, gamma })
    }

    /// Removes the normal component of `p`.
    pub fn projected(p: DVector<f64>, gamma: UnitVector) -> Self {
        let p = tangent_part(&p, &gamma);
        CotangentState { p, gamma }
    }
}

/// A point `(p̃, γ)` with `p̃ = νp`.
#[derive(Clone, Debug, PartialEq)]
pub struct TildeState {
    pub p_tilde: DVector<f64>,
    pub gamma: UnitVector,
}

impl TildeState {
    pub fn new(p_tilde: DVector<f64>, gamma: UnitVector) -> Result<Self> {
        check_tangent(&p_tilde, &gamma, "p̃")?;
        Ok(TildeState { p_tilde, gamma })
    }
}

/// Rates `(ṗ, γ̇)`; for the Hamiltonized system these are `d/dτ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentRates {
    pub p_dot: DVector<f64>,
    pub gamma_dot: DVector<f64>,
}

fn tangent_part(v: &DVector<f64>, gamma: &UnitVector) -> DVector<f64> {
    v - gamma.as_vector() * gamma.dot(v)
}

fn check_tangent(v: &DVector<f64>, gamma: &UnitVector, what: &str) -> Result<()> {
    if v.len() != gamma.dim() {
        return Err(Error::Dimension(format!(
            "{what} has length {}, γ has length {}",
            v.len(),
            gamma.dim()
        )));
    }
    let r = gamma.dot(v).abs();
    if r > TAU_COT * v.norm().max(1.0) {
        return Err(Error::Invariant(format!("(γ, {what}) = {r:.3e} is not zero")));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::Parameter(format!("epsilon must be finite and nonzero, got {eps}")));
    }
    Ok(())
}

/// `L_red = (1/2ε²)⟨𝐈(γ∧γ̇), γ∧γ̇⟩`.
pub fn reduced_lagrangian(ball: &Ball, gamma: &UnitVector, gamma_dot: &DVector<f64>) -> Result<f64> {
    ball.check_dim(gamma.dim(), "γ")?;
    check_tangent(gamma_dot, gamma, "γ̇")?;
    let x = wedge_unchecked(gamma, gamma_dot);
    let eps = ball.epsilon();
    Ok(pairing_unchecked(&ball.modified(&x), &x) / (2.0 * eps * eps))
}

/// `L_red = (1/2ε²)[(Aγ̇, γ̇)(Aγ, γ) − (Aγ, γ̇)²]`.
pub fn reduced_lagrangian_special(
    a: &DVector<f64>,
    eps: f64,
    gamma: &UnitVector,
    gamma_dot: &DVector<f64>,
) -> Result<f64> {
    check_eps(eps)?;
    check_tangent(gamma_dot, gamma, "γ̇")?;
    let ag = a.component_mul(gamma);
    let agd = a.component_mul(gamma_dot);
    Ok((agd.dot(gamma_dot) * ag.dot(gamma) - ag.dot(gamma_dot).powi(2)) / (2.0 * eps * eps))
}

/// Horizontal lift `(ω, 𝐕)` of a base velocity at the configuration `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lift {
    pub omega: SkewMatrix,
    pub velocity: DVector<f64>,
}

/// `ω = (1/ε)γ∧γ̇`, `𝐕 = −(σ ± ρ)(±ρ/σ) gγ̇`.
pub fn horizontal_lift(
    geom: &GeometryParams,
    g: &DMatrix<f64>,
    gamma: &UnitVector,
    gamma_dot: &DVector<f64>,
) -> Result<Lift> {
    let eps = geom.epsilon()?;
    check_tangent(gamma_dot, gamma, "γ̇")?;
    if g.nrows() != gamma.dim() || g.ncols() != gamma.dim() {
        return Err(Error::Dimension("attitude and γ dimensions differ".into()));
    }
    let omega = wedge_unchecked(gamma, gamma_dot).scale(1.0 / eps);
    let coef = -geom.center_distance() * geom.sign() * geom.rho / geom.sigma;
    Ok(Lift {
        omega,
        velocity: g * gamma_dot * coef,
    })
}

/// `(2ε − 1)/ε²`, the factor of the curvature of the rubber distribution.
pub fn jk_coefficient(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok((2.0 * eps - 1.0) / (eps * eps))
}

/// `((2ε − 1)/ε³)(𝐈(γ∧γ̇)γ̇, ξ)`, the gyroscopic term of the reduced equations.
pub fn jk_term(
    ball: &Ball,
    gamma: &UnitVector,
    gamma_dot: &DVector<f64>,
    xi: &DVector<f64>,
) -> Result<f64> {
    ball.check_dim(gamma.dim(), "γ")?;
    check_tangent(gamma_dot, gamma, "γ̇")?;
    check_tangent(xi, gamma, "ξ")?;
    let eps = ball.epsilon();
    let x = ball.modified(&wedge_unchecked(gamma, gamma_dot));
    Ok(jk_coefficient(eps)? / eps * x.apply(gamma_dot).dot(xi))
}

/// `p = −(1/ε²)𝐈(γ∧γ̇)γ`.
pub fn legendre(ball: &Ball, gamma: &UnitVector, gamma_dot: &DVector<f64>) -> Result<DVector<f64>> {
    ball.check_dim(gamma.dim(), "γ")?;
    check_tangent(gamma_dot, gamma, "γ̇")?;
    let eps = ball.epsilon();
    Ok(ball
        .modified(&wedge_unchecked(gamma, gamma_dot))
        .apply(gamma)
        * (-1.0 / (eps * eps)))
}

/// Solves the Legendre map for `γ̇` in the tangent basis of `complete_frame(γ)`.
///
/// Only the tangential part of `p` is used.
pub fn inverse_legendre(ball: &Ball, gamma: &UnitVector, p: &DVector<f64>) -> Result<DVector<f64>> {
    ball.check_dim(gamma.dim(), "γ")?;
    ball.check_dim(p.len(), "p")?;
    let n = ball.n();
    let frame = complete_frame(gamma);
    let basis: Vec<DVector<f64>> = (0..n - 1).map(|i| frame.column(i)).collect();
    let images: Vec<SkewMatrix> = basis
        .iter()
        .map(|b| ball.modified(&wedge_unchecked(gamma, b)))
        .collect();
    let eps2 = ball.epsilon().powi(2);
    let gram = DMatrix::from_fn(n - 1, n - 1, |i, j| {
        pairing_unchecked(&images[j], &wedge_unchecked(gamma, &basis[i])) / eps2
    });
    let rhs = DVector::from_iterator(n - 1, basis.iter().map(|b| b.dot(p)));
    let c = gram
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .ok_or_else(|| Error::Singular("Legendre map is not positive definite".into()))?;
    Ok(basis
        .iter()
        .zip(c.iter())
        .fold(DVector::zeros(n), |acc, (b, ci)| acc + b * *ci))
}

/// `Υ = (1/ε²)𝐈(γ∧γ̇)γ̇`, equal to `∂L_red/∂γ`.
pub fn upsilon(ball: &Ball, gamma: &UnitVector, gamma_dot: &DVector<f64>) -> DVector<f64> {
    let eps = ball.epsilon();
    ball.modified(&wedge_unchecked(gamma, gamma_dot))
        .apply(gamma_dot)
        / (eps * eps)
}

/// `γ̇ = X_γ(p, γ)`, `ṗ = ((1 − ε)/ε)Υ + μγ` with `μ` keeping `(γ, p) = 0`.
pub fn reduced_field_generic(ball: &Ball, state: &CotangentState) -> Result<CotangentRates> {
    let eps = ball.epsilon();
    let gamma_dot = inverse_legendre(ball, &state.gamma, &state.p)?;
    let ups = upsilon(ball, &state.gamma, &gamma_dot);
    let c = (1.0 - eps) / eps;
    let mu = -gamma_dot.dot(&state.p) - c * ups.dot(&state.gamma);
    Ok(CotangentRates {
        p_dot: ups * c + state.gamma.as_vector() * mu,
        gamma_dot,
    })
}

/// `½(p, γ̇)`, the energy of the reduced system for any inertia.
pub fn hamiltonian_generic(ball: &Ball, state: &CotangentState) -> Result<f64> {
    let gamma_dot = inverse_legendre(ball, &state.gamma, &state.p)?;
    Ok(0.5 * state.p.dot(&gamma_dot))
}

/// `𝐦 = εγ ∧ p`, the rubber momentum over a reduced state.
pub fn momentum_of(eps: f64, state: &CotangentState) -> SkewMatrix {
    wedge_unchecked(&state.gamma, &state.p).scale(eps)
}

/// Inverse of [`momentum_of`] for `𝐦 ∈ 𝔳_γ`: `p = −(1/ε)𝐦γ`.
pub fn cotangent_of(eps: f64, mm: &SkewMatrix, gamma: &UnitVector) -> CotangentState {
    CotangentState::projected(mm.apply(gamma) * (-1.0 / eps), gamma.clone())
}

/// `(det 𝐈|_{𝔳_γ})^{1/(2ε) − 1}`.
pub fn density_reduced_generic(ball: &Ball, gamma: &UnitVector) -> Result<f64> {
    crate::inertia::density_rubber_v(ball.modified_matrix(), gamma, ball.epsilon())
}

/// Determinant of 𝐈 on 𝔳_γ.
pub fn vertical_determinant(ball: &Ball, gamma: &UnitVector) -> f64 {
    vertical_det(ball.modified_matrix(), gamma)
}

fn check_special(a: &DVector<f64>, gamma: &UnitVector) -> Result<f64> {
    if a.len() != gamma.dim() {
        return Err(Error::Dimension(format!(
            "A has size {}, γ has length {}",
            a.len(),
            gamma.dim()
        )));
    }
    let s = a.component_mul(gamma).dot(gamma);
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("(Aγ, γ) must be positive, got {s}")));
    }
    Ok(s)
}

/// `(Aγ, γ)^{(n−2)/(2ε) + 2 − n}`.
pub fn density_reduced_special(a: &DVector<f64>, eps: f64, gamma: &UnitVector) -> Result<f64> {
    check_eps(eps)?;
    let s = check_special(a, gamma)?;
    let n = gamma.dim() as f64;
    Ok(s.powf((n - 2.0) / (2.0 * eps) + 2.0 - n))
}

/// Closed-form reduced flow for the special operator.
pub fn reduced_field_special(a: &DVector<f64>, eps: f64, state: &CotangentState) -> Result<CotangentRates> {
    check_eps(eps)?;
    let g = state.gamma.as_vector();
    let s = check_special(a, &state.gamma)?;
    let p = &state.p;
    let ainv_p = p.component_div(a);
    let p_ainv_g = ainv_p.dot(g);
    let p_ainv_p = ainv_p.dot(p);
    let ag = a.component_mul(g);
    let gamma_dot = (&ainv_p - g * p_ainv_g) * (eps * eps / s);
    let p_dot = (ag * p_ainv_p + p * (p_ainv_g * s)) * (eps * (1.0 - eps) / (s * s))
        - g * (eps / s * p_ainv_p);
    Ok(CotangentRates { p_dot, gamma_dot })
}

/// `H = (ε²/2)(p, A⁻¹p)/(γ, Aγ)`.
pub fn hamiltonian(a: &DVector<f64>, eps: f64, state: &CotangentState) -> Result<f64> {
    check_eps(eps)?;
    let s = check_special(a, &state.gamma)?;
    Ok(0.5 * eps * eps * state.p.component_div(a).dot(&state.p) / s)
}

/// Chaplygin multiplier `ν = ε(Aγ, γ)^{1/(2ε) − 1}`.
pub fn multiplier(a: &DVector<f64>, eps: f64, gamma: &UnitVector) -> Result<f64> {
    check_eps(eps)?;
    let s = check_special(a, gamma)?;
    Ok(eps * s.powf(1.0 / (2.0 * eps) - 1.0))
}

/// Euclidean gradient of [`multiplier`].
pub fn multiplier_gradient(a: &DVector<f64>, eps: f64, gamma: &UnitVector) -> Result<DVector<f64>> {
    check_eps(eps)?;
    let s = check_special(a, gamma)?;
    let k = 1.0 / (2.0 * eps) - 1.0;
    Ok(a.component_mul(gamma) * (2.0 * eps * k * s.powf(k - 1.0)))
}

/// `ds²_{A,ε}(dγ) = (γ, Aγ)^{1/ε − 2}[(A dγ, dγ)(Aγ, γ) − (Aγ, dγ)²]`.
pub fn metric_eval(a: &DVector<f64>, eps: f64, gamma: &UnitVector, dgamma: &DVector<f64>) -> Result<f64> {
    check_eps(eps)?;
    let s = check_special(a, gamma)?;
    check_tangent(dgamma, gamma, "dγ")?;
    Ok(s.powf(1.0 / eps - 2.0) * bracket(a, gamma, dgamma, s))
}

/// `ds²_A(dγ) = (1/(γ, Aγ))[(A dγ, dγ)(Aγ, γ) − (Aγ, dγ)²]`, the metric for rolling over a plane.
pub fn metric_horizontal(a: &DVector<f64>, gamma: &UnitVector, dgamma: &DVector<f64>) -> Result<f64> {
    let s = check_special(a, gamma)?;
    check_tangent(dgamma, gamma, "dγ")?;
    Ok(bracket(a, gamma, dgamma, s) / s)
}

fn bracket(a: &DVector<f64>, gamma: &UnitVector, dgamma: &DVector<f64>, s: f64) -> f64 {
    let ag = a.component_mul(gamma);
    a.component_mul(dgamma).dot(dgamma) * s - ag.dot(dgamma).powi(2)
}

/// `p̃ = νp`.
pub fn to_tilde(a: &DVector<f64>, eps: f64, state: &CotangentState) -> Result<TildeState> {
    let nu = multiplier(a, eps, &state.gamma)?;
    Ok(TildeState {
        p_tilde: &state.p * nu,
        gamma: state.gamma.clone(),
    })
}

pub fn from_tilde(a: &DVector<f64>, eps: f64, state: &TildeState) -> Result<CotangentState> {
    let nu = multiplier(a, eps, &state.gamma)?;
    Ok(CotangentState {
        p: &state.p_tilde / nu,
        gamma: state.gamma.clone(),
    })
}

/// `H(p̃, γ) = ½(γ, Aγ)^{1 − 1/ε}(p̃, A⁻¹p̃)`.
pub fn hamiltonian_tilde(a: &DVector<f64>, eps: f64, state: &TildeState) -> Result<f64> {
    check_eps(eps)?;
    let s = check_special(a, &state.gamma)?;
    Ok(0.5 * s.powf(1.0 - 1.0 / eps) * state.p_tilde.component_div(a).dot(&state.p_tilde))
}

/// Geodesic flow of `ds²_{A,ε}` in the new time `τ`, written with the
/// multipliers of the constraints `(γ, γ) = 1`, `(p̃, γ) = 0`.
pub fn hamiltonized_field(a: &DVector<f64>, eps: f64, state: &TildeState) -> Result<CotangentRates> {
    check_eps(eps)?;
    let s = check_special(a, &state.gamma)?;
    let g = state.gamma.as_vector();
    let pt = &state.p_tilde;
    let ainv = pt.component_div(a);
    let f = s.powf(1.0 - 1.0 / eps);
    let quad = ainv.dot(pt);
    let mu = f * ainv.dot(g);
    let two_lambda = -f * quad / eps;
    let gamma_dot = &ainv * f - g * mu;
    let p_dot = a.component_mul(g) * ((1.0 - eps) / eps * s.powf(-1.0 / eps) * quad)
        + g * two_lambda
        + pt * mu;
    Ok(CotangentRates { p_dot, gamma_dot })
}

/// Largest componentwise discrepancy between `X_H` and `ν X̃_H` pulled back
/// to `(p, γ)` by `d/dt(νp) = (∇ν, γ̇)p + νṗ`.
pub fn verify_hamiltonization(a: &DVector<f64>, eps: f64, state: &CotangentState) -> Result<f64> {
    let x = reduced_field_special(a, eps, state)?;
    let nu = multiplier(a, eps, &state.gamma)?;
    let grad = multiplier_gradient(a, eps, &state.gamma)?;
    let xt = hamiltonized_field(a, eps, &to_tilde(a, eps, state)?)?;
    let r_gamma = (&x.gamma_dot - &xt.gamma_dot * nu).amax();
    let lhs = &state.p * grad.dot(&x.gamma_dot) + &x.p_dot * nu;
    let r_p = (lhs - &xt.p_dot * nu).amax();
    Ok(r_gamma.max(r_p))
}
