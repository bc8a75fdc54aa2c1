//! Adapters exposing every flow of the library as an [`OdeSystem`] on a flat
//! state vector.
//!
//! Layouts (`N = n(n−1)/2`, matrices column-major):
//!
//! | system              | state                      |
//! |---------------------|----------------------------|
//! | `nonrubber-reduced` | `k (N)`, `γ (n)`           |
//! | `nonrubber-full`    | `k (N)`, `γ (n)`, `g (n²)` |
//! | `rubber`            | `m (N)`, `e₁…e_n (n²)`     |
//! | `rubber-extended`   | `𝐦 (N)`, `γ (n)`           |
//! | `reduced-generic`   | `p (n)`, `γ (n)`           |
//! | `reduced-special`   | `p (n)`, `γ (n)`           |
//! | `hamiltonized`      | `p̃ (n)`, `γ (n)`, `t`      |

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ball::{self, BallState};
use crate::error::{Error, Result};
use crate::harness::integrate::{MonitorSpec, OdeSystem};
use crate::harness::sample::{random_rotation, random_tangent, random_unit, gaussian};
use crate::model::Ball;
use crate::reduced::{self, CotangentState, TildeState};
use crate::rubber::{self, ExtMomentumState, RubberState};
use crate::son::{
    algebra_dim, basis_pairs, complete_frame, orthonormality_defect, polar_rotation, proj_h, proj_v,
    OrthFrame, SkewMatrix, UnitVector,
};

pub const TOL_ENERGY: f64 = 1e-8;
pub const TOL_GAMMA: f64 = 1e-9;
pub const TOL_TWIST: f64 = 1e-8;
pub const TOL_FRAME: f64 = 1e-8;
pub const TOL_COTANGENT: f64 = 1e-10;
pub const TOL_INTEGRAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    NonrubberFull,
    NonrubberReduced,
    Rubber,
    RubberExtended,
    ReducedGeneric,
    ReducedSpecial,
    Hamiltonized,
}

impl SystemKind {
    pub const ALL: [SystemKind; 7] = [
        SystemKind::NonrubberFull,
        SystemKind::NonrubberReduced,
        SystemKind::Rubber,
        SystemKind::RubberExtended,
        SystemKind::ReducedGeneric,
        SystemKind::ReducedSpecial,
        SystemKind::Hamiltonized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::NonrubberFull => "nonrubber-full",
            SystemKind::NonrubberReduced => "nonrubber-reduced",
            SystemKind::Rubber => "rubber",
            SystemKind::RubberExtended => "rubber-extended",
            SystemKind::ReducedGeneric => "reduced-generic",
            SystemKind::ReducedSpecial => "reduced-special",
            SystemKind::Hamiltonized => "hamiltonized",
        }
    }

    /// Whether the momentum of the initial state is an element of so(n)
    /// (otherwise it is a covector in ℝⁿ).
    pub fn algebra_momentum(self) -> bool {
        matches!(
            self,
            SystemKind::NonrubberFull
                | SystemKind::NonrubberReduced
                | SystemKind::Rubber
                | SystemKind::RubberExtended
        )
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SystemKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SystemKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!("unknown system '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// A ball together with the flow to integrate.
#[derive(Clone, Debug)]
pub struct Model {
    kind: SystemKind,
    ball: Ball,
    special: Option<DVector<f64>>,
    principal: Option<[f64; 3]>,
}

fn unit(v: DVector<f64>) -> Result<UnitVector> {
    UnitVector::new(v)
}

fn is_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

impl Model {
    pub fn new(kind: SystemKind, ball: Ball) -> Result<Self> {
        let special = ball.special_diag();
        if matches!(kind, SystemKind::ReducedSpecial | SystemKind::Hamiltonized) {
            match &special {
                None => {
                    return Err(Error::Config(format!(
                        "system '{kind}' needs a spec_op inertia"
                    )))
                }
                Some(a) if a.iter().any(|&x| x <= 0.0) => {
                    return Err(Error::Config(format!("system '{kind}' needs A > 0")))
                }
                _ => {}
            }
        }
        if kind == SystemKind::Rubber && ball.n() < 2 {
            return Err(Error::Dimension("rubber ball needs n >= 2".into()));
        }
        let principal = if ball.n() == 3 {
            ball::principal_moments(&ball).ok()
        } else {
            None
        };
        Ok(Model {
            kind,
            ball,
            special,
            principal,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    fn n(&self) -> usize {
        self.ball.n()
    }

    fn big(&self) -> usize {
        algebra_dim(self.n())
    }

    fn a(&self) -> &DVector<f64> {
        self.special.as_ref().expect("checked in Model::new")
    }

    fn skew(&self, y: &DVector<f64>, at: usize) -> SkewMatrix {
        let v = y.rows(at, self.big()).into_owned();
        SkewMatrix::from_vector(self.n(), &v).expect("length checked")
    }

    fn vec_at(&self, y: &DVector<f64>, at: usize) -> DVector<f64> {
        y.rows(at, self.n()).into_owned()
    }

    fn mat_at(&self, y: &DVector<f64>, at: usize) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_column_slice(n, n, y.rows(at, n * n).as_slice())
    }

    /// Offset of γ in the state vector.
    fn gamma_offset(&self) -> usize {
        match self.kind {
            SystemKind::NonrubberFull | SystemKind::NonrubberReduced | SystemKind::RubberExtended => self.big(),
            SystemKind::Rubber => self.big() + self.n() * (self.n() - 1),
            _ => self.n(),
        }
    }

    pub fn gamma_of(&self, y: &DVector<f64>) -> DVector<f64> {
        self.vec_at(y, self.gamma_offset())
    }

    /// Packs an admissible state from its parts.
    pub fn pack(&self, momentum: &DVector<f64>, gamma: &UnitVector, attitude: Option<&DMatrix<f64>>) -> Result<DVector<f64>> {
        let n = self.n();
        let expect = if self.kind.algebra_momentum() { self.big() } else { n };
        if momentum.len() != expect {
            return Err(Error::Config(format!(
                "initial momentum has length {}, system '{}' with n = {n} expects {expect}",
                momentum.len(),
                self.kind
            )));
        }
        self.ball.check_dim(gamma.dim(), "γ")?;
        let mut parts: Vec<f64> = momentum.iter().copied().collect();
        match self.kind {
            SystemKind::NonrubberReduced | SystemKind::RubberExtended | SystemKind::ReducedGeneric | SystemKind::ReducedSpecial => {
                parts.extend(gamma.iter());
            }
            SystemKind::NonrubberFull => {
                parts.extend(gamma.iter());
                let g = attitude.cloned().unwrap_or_else(|| DMatrix::identity(n, n));
                if g.nrows() != n || g.ncols() != n {
                    return Err(Error::Config("attitude has the wrong size".into()));
                }
                parts.extend(g.iter());
            }
            SystemKind::Rubber => {
                parts.extend(complete_frame(gamma).matrix().iter());
            }
            SystemKind::Hamiltonized => {
                parts.extend(gamma.iter());
                parts.push(0.0);
            }
        }
        Ok(DVector::from_vec(parts))
    }

    /// Random admissible state with momentum of size `scale`.
    pub fn random_state(&self, rng: &mut impl Rng, scale: f64) -> Result<DVector<f64>> {
        let n = self.n();
        let gamma = random_unit(rng, n);
        let momentum = match self.kind {
            SystemKind::NonrubberFull | SystemKind::NonrubberReduced => gaussian(rng, self.big()) * scale,
            SystemKind::Rubber | SystemKind::RubberExtended => {
                let x = random_tangent(rng, &gamma, scale);
                let omega = crate::son::wedge(&x, &gamma)?;
                if self.kind == SystemKind::Rubber {
                    self.ball.modified(&omega).to_vector()
                } else {
                    rubber::mixed_momentum(&self.ball, &omega, &gamma).to_vector()
                }
            }
            _ => random_tangent(rng, &gamma, scale),
        };
        let g = random_rotation(rng, n);
        self.pack(&momentum, &gamma, Some(&g))
    }

    fn rubber_state(&self, y: &DVector<f64>) -> RubberState {
        RubberState {
            m: self.skew(y, 0),
            frame: OrthFrame::from_matrix_unchecked(self.mat_at(y, self.big())),
        }
    }

    fn cotangent(&self, y: &DVector<f64>) -> Result<CotangentState> {
        Ok(CotangentState {
            p: self.vec_at(y, 0),
            gamma: unit(self.vec_at(y, self.n()))?,
        })
    }

    fn tilde(&self, y: &DVector<f64>) -> Result<TildeState> {
        Ok(TildeState {
            p_tilde: self.vec_at(y, 0),
            gamma: unit(self.vec_at(y, self.n()))?,
        })
    }

    /// Checks that `y` is an admissible initial state, naming the violated residual.
    pub fn validate_state(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "state has length {}, expected {}",
                y.len(),
                self.dim()
            )));
        }
        let values = self.monitors(y)?;
        for (spec, v) in self.monitor_specs().iter().zip(values) {
            if spec.kind == crate::harness::integrate::MonitorKind::Residual && v.abs() > spec.tolerance {
                return Err(Error::Invariant(format!(
                    "initial state violates '{}' ({:.3e} > {:.0e})",
                    spec.name,
                    v.abs(),
                    spec.tolerance
                )));
            }
        }
        Ok(())
    }
}

impl OdeSystem for Model {
    fn dim(&self) -> usize {
        let (n, big) = (self.n(), self.big());
        match self.kind {
            SystemKind::NonrubberReduced | SystemKind::RubberExtended => big + n,
            SystemKind::NonrubberFull => big + n + n * n,
            SystemKind::Rubber => big + n * n,
            SystemKind::ReducedGeneric | SystemKind::ReducedSpecial => 2 * n,
            SystemKind::Hamiltonized => 2 * n + 1,
        }
    }

    fn rhs(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let (n, big) = (self.n(), self.big());
        let mut out = Vec::with_capacity(self.dim());
        match self.kind {
            SystemKind::NonrubberReduced => {
                let r = ball::reduced_field(&self.ball, &self.skew(y, 0), &unit(self.vec_at(y, big))?)?;
                out.extend(r.k_dot.to_vector().iter());
                out.extend(r.gamma_dot.iter());
            }
            SystemKind::NonrubberFull => {
                let state = BallState {
                    k: self.skew(y, 0),
                    gamma: unit(self.vec_at(y, big))?,
                    attitude: Some(self.mat_at(y, big + n)),
                };
                let r = ball::full_field(&self.ball, &state)?;
                out.extend(r.k_dot.to_vector().iter());
                out.extend(r.gamma_dot.iter());
                out.extend(r.g_dot.iter());
            }
            SystemKind::Rubber => {
                let r = rubber::rubber_field(&self.ball, &self.rubber_state(y))?;
                out.extend(r.m_dot.to_vector().iter());
                out.extend(r.frame_dot.iter());
            }
            SystemKind::RubberExtended => {
                let s = ExtMomentumState {
                    mm: self.skew(y, 0),
                    gamma: unit(self.vec_at(y, big))?,
                };
                let (dm, dg) = rubber::ext_momentum_field(&self.ball, &s)?;
                out.extend(dm.to_vector().iter());
                out.extend(dg.iter());
            }
            SystemKind::ReducedGeneric => {
                let r = reduced::reduced_field_generic(&self.ball, &self.cotangent(y)?)?;
                out.extend(r.p_dot.iter());
                out.extend(r.gamma_dot.iter());
            }
            SystemKind::ReducedSpecial => {
                let r = reduced::reduced_field_special(self.a(), self.ball.epsilon(), &self.cotangent(y)?)?;
                out.extend(r.p_dot.iter());
                out.extend(r.gamma_dot.iter());
            }
            SystemKind::Hamiltonized => {
                let s = self.tilde(y)?;
                let eps = self.ball.epsilon();
                let r = reduced::hamiltonized_field(self.a(), eps, &s)?;
                let nu = reduced::multiplier(self.a(), eps, &s.gamma)?;
                out.extend(r.p_dot.iter());
                out.extend(r.gamma_dot.iter());
                out.push(1.0 / nu);
            }
        }
        Ok(DVector::from_vec(out))
    }

    fn project(&self, y: &mut DVector<f64>) {
        let (n, big) = (self.n(), self.big());
        let normalize = |y: &mut DVector<f64>, at: usize| {
            let norm = y.rows(at, n).norm();
            if norm > 0.0 {
                let mut r = y.rows_mut(at, n);
                r /= norm;
            }
        };
        match self.kind {
            SystemKind::NonrubberReduced => normalize(y, big),
            SystemKind::RubberExtended => {
                normalize(y, big);
                // pr_h 𝐦 = pr_h ω, so the twist is removed by projecting 𝐦
                let Ok(gamma) = unit(self.vec_at(y, big)) else { return };
                let mm = self.skew(y, 0);
                if proj_h(&mm, &gamma).norm() > rubber::TWIST_PROJECT_BELOW * mm.norm() {
                    let mm = proj_v(&mm, &gamma);
                    y.rows_mut(0, big).copy_from(&mm.to_vector());
                }
            }
            SystemKind::NonrubberFull => {
                normalize(y, big);
                let g = polar_rotation(self.mat_at(y, big + n));
                y.rows_mut(big + n, n * n).copy_from_slice(g.as_slice());
            }
            SystemKind::Rubber => {
                let s = rubber::project_rubber(&self.ball, &self.skew(y, 0), self.mat_at(y, big));
                y.rows_mut(0, big).copy_from(&s.m.to_vector());
                y.rows_mut(big, n * n).copy_from_slice(s.frame.matrix().as_slice());
            }
            SystemKind::ReducedGeneric | SystemKind::ReducedSpecial | SystemKind::Hamiltonized => {
                normalize(y, n);
                let g = self.vec_at(y, n);
                let p = self.vec_at(y, 0);
                let p = &p - &g * g.dot(&p);
                y.rows_mut(0, n).copy_from(&p);
            }
        }
    }

    fn state_names(&self) -> Vec<String> {
        let n = self.n();
        let pairs = basis_pairs(n);
        let skew = |s: &str| -> Vec<String> {
            pairs.iter().map(|(i, j)| format!("{s}_{}{}", i + 1, j + 1)).collect()
        };
        let vector = |s: &str| -> Vec<String> { (1..=n).map(|i| format!("{s}_{i}")).collect() };
        let matrix = |s: &str| -> Vec<String> {
            let mut v = Vec::with_capacity(n * n);
            for j in 1..=n {
                for i in 1..=n {
                    v.push(format!("{s}_{i}{j}"));
                }
            }
            v
        };
        let mut names = Vec::new();
        match self.kind {
            SystemKind::NonrubberReduced => {
                names.extend(skew("k"));
                names.extend(vector("gamma"));
            }
            SystemKind::NonrubberFull => {
                names.extend(skew("k"));
                names.extend(vector("gamma"));
                names.extend(matrix("g"));
            }
            SystemKind::Rubber => {
                names.extend(skew("m"));
                names.extend(matrix("e"));
            }
            SystemKind::RubberExtended => {
                names.extend(skew("mm"));
                names.extend(vector("gamma"));
            }
            SystemKind::ReducedGeneric | SystemKind::ReducedSpecial => {
                names.extend(vector("p"));
                names.extend(vector("gamma"));
            }
            SystemKind::Hamiltonized => {
                names.extend(vector("pt"));
                names.extend(vector("gamma"));
                names.push("t_phys".into());
            }
        }
        names
    }

    fn monitor_specs(&self) -> Vec<MonitorSpec> {
        let mut specs = vec![
            MonitorSpec::integral("energy", TOL_ENERGY),
            MonitorSpec::residual("gamma_norm", TOL_GAMMA),
        ];
        let eps = self.ball.epsilon();
        match self.kind {
            SystemKind::NonrubberReduced | SystemKind::NonrubberFull => {
                if self.kind == SystemKind::NonrubberFull {
                    specs.push(MonitorSpec::residual("attitude", TOL_FRAME));
                }
                if self.principal.is_some() {
                    specs.push(MonitorSpec::integral("f1", TOL_INTEGRAL));
                    specs.push(MonitorSpec::integral("f2", TOL_INTEGRAL));
                    specs.push(MonitorSpec::integral("f3", TOL_INTEGRAL));
                    let f4 = MonitorSpec::integral("f4", TOL_INTEGRAL);
                    specs.push(if is_close(eps, 1.0) { f4 } else { f4.reported() });
                    let f4t = MonitorSpec::integral("f4_tilde", TOL_INTEGRAL);
                    specs.push(if is_close(eps, -1.0) { f4t } else { f4t.reported() });
                }
            }
            SystemKind::Rubber => {
                specs.push(MonitorSpec::residual("twist", TOL_TWIST));
                specs.push(MonitorSpec::residual("frame", TOL_FRAME));
            }
            SystemKind::RubberExtended => {
                specs.push(MonitorSpec::residual("twist", TOL_TWIST));
            }
            SystemKind::ReducedGeneric | SystemKind::ReducedSpecial | SystemKind::Hamiltonized => {
                specs.push(MonitorSpec::residual("cotangent", TOL_COTANGENT));
            }
        }
        specs
    }

    fn monitors(&self, y: &DVector<f64>) -> Result<Vec<f64>> {
        let (n, big) = (self.n(), self.big());
        let gamma_raw = self.gamma_of(y);
        let mut out = Vec::new();
        match self.kind {
            SystemKind::NonrubberReduced | SystemKind::NonrubberFull => {
                let k = self.skew(y, 0);
                let gamma = unit(gamma_raw.clone())?;
                out.push(ball::energy(&self.ball, &k, &gamma)?);
                out.push(gamma_raw.norm() - 1.0);
                if self.kind == SystemKind::NonrubberFull {
                    out.push(orthonormality_defect(&self.mat_at(y, big + n)));
                }
                if self.principal.is_some() {
                    let f = ball::integrals_3d(&self.ball, &k, &gamma)?;
                    out.push(gamma_raw.norm_squared());
                    out.extend([f.f2, f.f3, f.f4, f.f4_tilde]);
                }
            }
            SystemKind::Rubber => {
                let s = self.rubber_state(y);
                out.push(rubber::rubber_energy(&self.ball, &s.m));
                out.push(gamma_raw.norm() - 1.0);
                let twist = rubber::no_twist_functions(&self.ball, &s)
                    .into_iter()
                    .fold(0.0_f64, |acc, v| acc.max(v.abs()));
                out.push(twist);
                out.push(orthonormality_defect(s.frame.matrix()));
            }
            SystemKind::RubberExtended => {
                let gamma = unit(gamma_raw.clone())?;
                let omega = rubber::omega_from_mixed(&self.ball, &self.skew(y, 0), &gamma)?;
                out.push(0.5 * crate::son::pairing_unchecked(&self.ball.modified(&omega), &omega));
                out.push(gamma_raw.norm() - 1.0);
                out.push(proj_h(&omega, &gamma).norm());
            }
            SystemKind::ReducedGeneric => {
                let s = self.cotangent(y)?;
                out.push(reduced::hamiltonian_generic(&self.ball, &s)?);
                out.push(gamma_raw.norm() - 1.0);
                out.push(gamma_raw.dot(&s.p));
            }
            SystemKind::ReducedSpecial => {
                let s = self.cotangent(y)?;
                out.push(reduced::hamiltonian(self.a(), self.ball.epsilon(), &s)?);
                out.push(gamma_raw.norm() - 1.0);
                out.push(gamma_raw.dot(&s.p));
            }
            SystemKind::Hamiltonized => {
                let s = self.tilde(y)?;
                out.push(reduced::hamiltonian_tilde(self.a(), self.ball.epsilon(), &s)?);
                out.push(gamma_raw.norm() - 1.0);
                out.push(gamma_raw.dot(&s.p_tilde));
            }
        }
        Ok(out)
    }

    fn direction(&self) -> f64 {
        if self.kind == SystemKind::Hamiltonized && self.ball.epsilon() < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}
