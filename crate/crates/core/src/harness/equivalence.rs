//! Cross-checks between formulations of the same dynamics, pointwise and
//! along trajectories.
//!
//! * `reparametrization`: the special reduced flow in `t` against the
//!   Hamiltonized geodesic flow in `τ`, mapped back through `t(τ)` and `p = p̃/ν`;
//! * `rubber-formulations`: multiplier form `(m, frame)` against the
//!   extended momentum `(𝐦, γ)`;
//! * `reduced-formulations`: generic against special reduced field (SpecOp);
//! * `reduced-extended`: reduced `(p, γ)` against `(𝐦, γ)` with `𝐦 = εγ∧p`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::proj_v_rate;
use crate::error::{Error, Result};
use crate::harness::integrate::{integrate_system, rk4_final, rk4_step, IntegratorConfig, OdeSystem};
use crate::harness::sample::{random_inertia, InertiaFamily};
use crate::harness::systems::{Model, SystemKind};
use crate::model::Ball;
use crate::reduced::{self, CotangentState};
use crate::rubber::{self, ExtMomentumState, RubberState};
use crate::son::{algebra_dim, proj_v, wedge_unchecked, OrthFrame, SkewMatrix, UnitVector};

pub const TOL_FIELD: f64 = 1e-10;
pub const TOL_TRAJECTORY: f64 = 1e-6;
pub const TOL_REPARAMETRIZATION: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceKind {
    Reparametrization,
    RubberFormulations,
    ReducedFormulations,
    ReducedExtended,
}

impl EquivalenceKind {
    pub const ALL: [EquivalenceKind; 4] = [
        EquivalenceKind::Reparametrization,
        EquivalenceKind::RubberFormulations,
        EquivalenceKind::ReducedFormulations,
        EquivalenceKind::ReducedExtended,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquivalenceKind::Reparametrization => "reparametrization",
            EquivalenceKind::RubberFormulations => "rubber-formulations",
            EquivalenceKind::ReducedFormulations => "reduced-formulations",
            EquivalenceKind::ReducedExtended => "reduced-extended",
        }
    }

    pub fn needs_special(self) -> bool {
        matches!(self, EquivalenceKind::Reparametrization | EquivalenceKind::ReducedFormulations)
    }

    pub fn trajectory_threshold(self) -> f64 {
        match self {
            EquivalenceKind::Reparametrization => TOL_REPARAMETRIZATION,
            _ => TOL_TRAJECTORY,
        }
    }
}

impl fmt::Display for EquivalenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquivalenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EquivalenceKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = EquivalenceKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!("unknown equivalence '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub kind: EquivalenceKind,
    pub n: usize,
    pub epsilon: f64,
    pub d: f64,
    pub family: InertiaFamily,
    /// Number of random initial conditions.
    pub samples: usize,
    /// Largest step in physical time.
    pub h: f64,
    pub t_end: f64,
    pub seed: u64,
}

impl EquivalenceConfig {
    pub fn new(kind: EquivalenceKind, n: usize, epsilon: f64) -> Self {
        EquivalenceConfig {
            kind,
            n,
            epsilon,
            d: 0.7,
            family: if kind.needs_special() {
                InertiaFamily::SpecOp
            } else {
                InertiaFamily::Generic
            },
            samples: 4,
            h: 1e-3,
            t_end: 1.0,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub kind: EquivalenceKind,
    pub n: usize,
    pub epsilon: f64,
    pub samples: usize,
    /// Largest pointwise discrepancy of the vector fields at the initial states.
    pub field_error: f64,
    /// Largest discrepancy along the trajectories.
    pub trajectory_error: f64,
    pub field_threshold: f64,
    pub trajectory_threshold: f64,
    pub passed: bool,
}

fn sup(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

fn unit_at(y: &DVector<f64>, at: usize, n: usize) -> Result<UnitVector> {
    UnitVector::new(y.rows(at, n).into_owned())
}

/// Max discrepancy between the multiplier and extended rubber fields, compared
/// through `𝐦 = pr_v m` and `d/dt pr_v m`.
pub fn rubber_field_error(ball: &Ball, state: &RubberState) -> Result<f64> {
    let g = state.gamma();
    let omega = ball.modified_inv(&state.m);
    let mm = rubber::mixed_momentum(ball, &omega, &g);
    let (dmm, dg) = rubber::ext_momentum_field(ball, &ExtMomentumState { mm, gamma: g.clone() })?;
    let r = rubber::rubber_field(ball, state)?;
    let expected = proj_v(&r.m_dot, &g).add(&proj_v_rate(&state.m, g.as_vector(), &r.gamma_dot));
    Ok(dmm.sub(&expected).to_vector().amax().max(sup(&dg, &r.gamma_dot)))
}

/// Max discrepancy between the generic and the special reduced field.
pub fn reduced_field_error(ball: &Ball, state: &CotangentState) -> Result<f64> {
    let a = ball
        .special_diag()
        .ok_or_else(|| Error::Config("reduced-formulations needs a spec_op inertia".into()))?;
    let x = reduced::reduced_field_generic(ball, state)?;
    let y = reduced::reduced_field_special(&a, ball.epsilon(), state)?;
    Ok(sup(&x.p_dot, &y.p_dot).max(sup(&x.gamma_dot, &y.gamma_dot)))
}

/// Max discrepancy between `d/dt(εγ∧p)` along the reduced flow and the
/// extended field at `𝐦 = εγ∧p`.
pub fn reduced_extended_field_error(ball: &Ball, state: &CotangentState) -> Result<f64> {
    let eps = ball.epsilon();
    let r = reduced::reduced_field_generic(ball, state)?;
    let mm = reduced::momentum_of(eps, state);
    let (dmm, dg) = rubber::ext_momentum_field(
        ball,
        &ExtMomentumState {
            mm,
            gamma: state.gamma.clone(),
        },
    )?;
    let expected = wedge_unchecked(&r.gamma_dot, &state.p)
        .add(&wedge_unchecked(state.gamma.as_vector(), &r.p_dot))
        .scale(eps);
    Ok(dmm.sub(&expected).to_vector().amax().max(sup(&dg, &r.gamma_dot)))
}

/// Sup over `t ∈ [0, t_end]` of the difference between the special reduced
/// flow and the Hamiltonized flow taken back to `(p, γ)` at the same
/// physical time. The τ-step is chosen so that every physical step is at most `h`.
pub fn reparametrization_error(ball: &Ball, state: &CotangentState, h: f64, t_end: f64) -> Result<f64> {
    let a = ball
        .special_diag()
        .ok_or_else(|| Error::Config("reparametrization needs a spec_op inertia".into()))?;
    let eps = ball.epsilon();
    let n = ball.n();
    let special = Model::new(SystemKind::ReducedSpecial, ball.clone())?;
    let ham = Model::new(SystemKind::Hamiltonized, ball.clone())?;
    let tilde = reduced::to_tilde(&a, eps, state)?;
    let mut ys = special.pack(&state.p, &state.gamma, None)?;
    let mut yh = ham.pack(&tilde.p_tilde, &state.gamma, None)?;

    // |ν| = |ε| s^k is monotone in s ∈ [min a, max a]
    let k = 1.0 / (2.0 * eps) - 1.0;
    let nu_min = eps.abs() * a.min().powf(k).min(a.max().powf(k));
    let dtau = ham.direction() * h * nu_min;

    let mut t_prev = 0.0;
    let mut err: f64 = 0.0;
    let mut guard = 0usize;
    while t_prev < t_end {
        yh = rk4_step(&ham, &yh, dtau)?;
        ham.project(&mut yh);
        let t = yh[2 * n];
        if !(t > t_prev) {
            return Err(Error::Invariant(format!("physical time is not increasing (t = {t})")));
        }
        ys = rk4_final(&special, &ys, h, t - t_prev, true)?;
        t_prev = t;
        let g = unit_at(&yh, n, n)?;
        let nu = reduced::multiplier(&a, eps, &g)?;
        let p = yh.rows(0, n) / nu;
        err = err
            .max(sup(&ys.rows(0, n).into_owned(), &p))
            .max(sup(&ys.rows(n, n).into_owned(), &yh.rows(n, n).into_owned()));
        guard += 1;
        if guard > 100_000_000 {
            return Err(Error::Config("reparametrization needs too many steps".into()));
        }
    }
    Ok(err)
}

fn trajectory_gap(
    a: &Model,
    ya: &DVector<f64>,
    b: &Model,
    yb: &DVector<f64>,
    cfg: &IntegratorConfig,
    compare: impl Fn(&DVector<f64>, &DVector<f64>) -> Result<f64>,
) -> Result<f64> {
    let ta = integrate_system(a, ya, cfg)?;
    let tb = integrate_system(b, yb, cfg)?;
    let mut err: f64 = 0.0;
    for (sa, sb) in ta.states.iter().zip(&tb.states) {
        err = err.max(compare(sa, sb)?);
    }
    Ok(err)
}

/// One random initial condition: `(field error, trajectory error)`.
fn check_sample(kind: EquivalenceKind, ball: &Ball, y0: &DVector<f64>, h: f64, t_end: f64) -> Result<(f64, f64)> {
    let n = ball.n();
    let big = algebra_dim(n);
    let eps = ball.epsilon();
    let cfg = IntegratorConfig::rk4(h, t_end);
    let cot = |y: &DVector<f64>| -> Result<CotangentState> {
        Ok(CotangentState::projected(y.rows(0, n).into_owned(), unit_at(y, n, n)?))
    };
    match kind {
        EquivalenceKind::Reparametrization => {
            let s = cot(y0)?;
            let a = ball.special_diag().expect("checked");
            let field = reduced::verify_hamiltonization(&a, eps, &s)?;
            Ok((field, reparametrization_error(ball, &s, h, t_end)?))
        }
        EquivalenceKind::ReducedFormulations => {
            let s = cot(y0)?;
            let field = reduced_field_error(ball, &s)?;
            let gm = Model::new(SystemKind::ReducedGeneric, ball.clone())?;
            let sm = Model::new(SystemKind::ReducedSpecial, ball.clone())?;
            let traj = trajectory_gap(&gm, y0, &sm, y0, &cfg, |a, b| Ok(sup(a, b)))?;
            Ok((field, traj))
        }
        EquivalenceKind::RubberFormulations => {
            let rm = Model::new(SystemKind::Rubber, ball.clone())?;
            let em = Model::new(SystemKind::RubberExtended, ball.clone())?;
            let state_of = |y: &DVector<f64>| -> Result<RubberState> {
                let m = SkewMatrix::from_vector(n, &y.rows(0, big).into_owned())?;
                let frame = nalgebra::DMatrix::from_column_slice(n, n, y.rows(big, n * n).as_slice());
                Ok(RubberState {
                    m,
                    frame: OrthFrame::from_matrix_unchecked(frame),
                })
            };
            let s = state_of(y0)?;
            let field = rubber_field_error(ball, &s)?;
            let g = s.gamma();
            let mm = proj_v(&s.m, &g);
            let ye = em.pack(&mm.to_vector(), &g, None)?;
            let traj = trajectory_gap(&rm, y0, &em, &ye, &cfg, |a, b| {
                let sa = state_of(a)?;
                let ga = sa.gamma();
                let wa = ball.modified_inv(&sa.m);
                let gb = unit_at(b, big, n)?;
                let wb = rubber::omega_from_mixed(ball, &SkewMatrix::from_vector(n, &b.rows(0, big).into_owned())?, &gb)?;
                Ok(wa.sub(&wb).to_vector().amax().max(sup(ga.as_vector(), gb.as_vector())))
            })?;
            Ok((field, traj))
        }
        EquivalenceKind::ReducedExtended => {
            let s = cot(y0)?;
            let field = reduced_extended_field_error(ball, &s)?;
            let rm = Model::new(SystemKind::ReducedGeneric, ball.clone())?;
            let em = Model::new(SystemKind::RubberExtended, ball.clone())?;
            let ye = em.pack(&reduced::momentum_of(eps, &s).to_vector(), &s.gamma, None)?;
            let traj = trajectory_gap(&rm, y0, &em, &ye, &cfg, |a, b| {
                let sa = cot(a)?;
                let ma = reduced::momentum_of(eps, &sa).to_vector();
                Ok(sup(&ma, &b.rows(0, big).into_owned()).max(sup(sa.gamma.as_vector(), &b.rows(big, n).into_owned())))
            })?;
            Ok((field, traj))
        }
    }
}

/// Draws one inertia and `samples` initial states from the seed and checks
/// them in parallel.
pub fn verify_equivalence(cfg: &EquivalenceConfig) -> Result<EquivalenceReport> {
    if cfg.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    if cfg.n < 2 {
        return Err(Error::Config(format!("n must be at least 2, got {}", cfg.n)));
    }
    if !(cfg.h > 0.0 && cfg.h.is_finite()) || !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(Error::Config("h must be positive and t_end non-negative".into()));
    }
    if cfg.kind.needs_special() && cfg.family != InertiaFamily::SpecOp {
        return Err(Error::Config(format!("'{}' needs the spec_op family", cfg.kind)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spec = random_inertia(&mut rng, cfg.family, cfg.n, cfg.d)?;
    let ball = Ball::new(spec, cfg.epsilon, cfg.d)?;
    let primary = match cfg.kind {
        EquivalenceKind::Reparametrization | EquivalenceKind::ReducedFormulations => SystemKind::ReducedSpecial,
        EquivalenceKind::RubberFormulations => SystemKind::Rubber,
        EquivalenceKind::ReducedExtended => SystemKind::ReducedGeneric,
    };
    let model = Model::new(primary, ball.clone())?;
    let starts = (0..cfg.samples)
        .map(|_| model.random_state(&mut rng, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let results = starts
        .par_iter()
        .map(|y0| check_sample(cfg.kind, &ball, y0, cfg.h, cfg.t_end))
        .collect::<Result<Vec<_>>>()?;
    let field_error = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let trajectory_error = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let trajectory_threshold = cfg.kind.trajectory_threshold();
    Ok(EquivalenceReport {
        kind: cfg.kind,
        n: cfg.n,
        epsilon: cfg.epsilon,
        samples: cfg.samples,
        field_error,
        trajectory_error,
        field_threshold: TOL_FIELD,
        trajectory_threshold,
        passed: field_error < TOL_FIELD && trajectory_error < trajectory_threshold,
    })
}
