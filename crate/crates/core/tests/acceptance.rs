//! Acceptance checks, one line per criterion.
//!
//! Runs with its own `main` so that the verdict lines are never captured.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use chaplygin::harness::equivalence::{verify_equivalence, EquivalenceConfig, EquivalenceKind};
use chaplygin::harness::hamilton::{verify_hamiltonization_batch, HamiltonizationConfig};
use chaplygin::harness::integrate::rk4_final;
use chaplygin::harness::measure::{verify_measure, MeasureConfig, MeasureSystem};
use chaplygin::harness::sample::{random_inertia, random_tangent, random_unit, InertiaFamily};
use chaplygin::harness::{integrate_system, monitor_suite, IntegratorConfig, Model, SystemKind};
use chaplygin::inertia::density_nonrubber;
use chaplygin::reduced;
use chaplygin::{Ball, InertiaSpec, UnitVector};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const FAMILIES: [InertiaFamily; 3] = [InertiaFamily::ChOp, InertiaFamily::SpecOp, InertiaFamily::Generic];

struct LongRun {
    kind: SystemKind,
    n: usize,
    family: InertiaFamily,
    energy: f64,
    gamma: f64,
    twist: f64,
    frame: f64,
    elapsed: Duration,
}

/// t ∈ [0, 10] with RK4, h = 1e-3, for every system, n and inertia family.
fn long_runs() -> &'static [LongRun] {
    static RUNS: std::sync::OnceLock<Vec<LongRun>> = std::sync::OnceLock::new();
    RUNS.get_or_init(|| {
        let kinds = [SystemKind::NonrubberReduced, SystemKind::NonrubberFull, SystemKind::Rubber, SystemKind::RubberExtended];
        let mut grid = Vec::new();
        for kind in kinds {
            for n in 3..=5 {
                for family in FAMILIES {
                    grid.push((kind, n, family));
                }
            }
        }
        grid.par_iter()
            .enumerate()
            .map(|(i, &(kind, n, family))| {
                let mut r = rng(1000 + i as u64);
                let spec = random_inertia(&mut r, family, n, 0.7).unwrap();
                let eps = [0.3, 0.7, 2.0][i % 3];
                let model = Model::new(kind, Ball::new(spec, eps, 0.7).unwrap()).unwrap();
                let y0 = model.random_state(&mut r, 1.0).unwrap();
                let start = Instant::now();
                let traj = integrate_system(&model, &y0, &IntegratorConfig::rk4(1e-3, 10.0)).unwrap();
                let elapsed = start.elapsed();
                let rep = monitor_suite(&traj, &[]).unwrap();
                let get = |name: &str| rep.get(name).map(|c| c.judged()).unwrap_or(0.0);
                LongRun {
                    kind,
                    n,
                    family,
                    energy: get("energy"),
                    gamma: get("gamma_norm"),
                    twist: get("twist"),
                    frame: get("frame").max(get("attitude")),
                    elapsed,
                }
            })
            .collect()
    })
}

fn worst<'a>(runs: &'a [LongRun], f: impl Fn(&LongRun) -> f64) -> (&'a LongRun, f64) {
    runs.iter()
        .map(|r| (r, f(r)))
        .fold(None, |acc: Option<(&LongRun, f64)>, x| match acc {
            Some(a) if a.1 >= x.1 => Some(a),
            _ => Some(x),
        })
        .unwrap()
}

fn energy_conservation() -> Outcome {
    let runs = long_runs();
    let (w, e) = worst(runs, |r| r.energy);
    let slowest = runs.iter().map(|r| r.elapsed).max().unwrap();
    Outcome::new(
        e < 1e-8 && slowest < Duration::from_secs(30),
        format!(
            "{} runs, max relative energy drift {e:.2e} ({} n={} {:?}), slowest run {:.2}s",
            runs.len(),
            w.kind,
            w.n,
            w.family,
            slowest.as_secs_f64()
        ),
    )
}

fn constraint_preservation() -> Outcome {
    let runs = long_runs();
    let g = worst(runs, |r| r.gamma).1;
    let t = worst(runs, |r| r.twist).1;
    let f = worst(runs, |r| r.frame).1;
    Outcome::new(
        g < 1e-9 && t < 1e-8 && f < 1e-8,
        format!("max ||γ|−1| {g:.2e}, max twist {t:.2e}, max frame defect {f:.2e}"),
    )
}

fn classical_integrals() -> Outcome {
    let ball = |eps| Ball::new(InertiaSpec::principal_3d([1.0, 1.6, 2.3]).unwrap(), eps, 0.5).unwrap();
    let k = DVector::from_vec(vec![0.4, -0.7, 0.5]);
    let g = UnitVector::new(DVector::from_vec(vec![0.0, 0.6, 0.8])).unwrap();
    let mut cfg = IntegratorConfig::rk4(1e-3, 10.0);
    // the integrals are properties of the flow itself, so no projection here
    cfg.projection = false;
    let run = |eps: f64| {
        let m = Model::new(SystemKind::NonrubberReduced, ball(eps)).unwrap();
        let y0 = m.pack(&k, &g, None).unwrap();
        monitor_suite(&integrate_system(&m, &y0, &cfg).unwrap(), &[]).unwrap()
    };
    let mut f123 = 0.0_f64;
    let mut f4_at_one = 0.0;
    let mut f4_at_07 = 0.0;
    let mut f4t_at_minus_one = 0.0;
    for eps in [-1.0, 0.3, 0.7, 1.0, 2.0] {
        let r = run(eps);
        for name in ["f1", "f2", "f3"] {
            f123 = f123.max(r.get(name).unwrap().max_rel_drift);
        }
        if eps == 1.0 {
            f4_at_one = r.get("f4").unwrap().max_rel_drift;
        }
        if eps == 0.7 {
            f4_at_07 = r.get("f4").unwrap().max_abs_drift;
        }
        if eps == -1.0 {
            f4t_at_minus_one = r.get("f4_tilde").unwrap().max_rel_drift;
        }
    }
    Outcome::new(
        f123 < 1e-8 && f4_at_one < 1e-8 && f4_at_07 > 1e-3 && f4t_at_minus_one < 1e-8,
        format!(
            "F1..F3 drift {f123:.2e} over ε ∈ {{−1, 0.3, 0.7, 1, 2}}; F4 drift {f4_at_one:.2e} at ε=1, \
             {f4_at_07:.2e} at ε=0.7; F̃4 drift {f4t_at_minus_one:.2e} at ε=−1"
        ),
    )
}

fn invariant_measures() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for sys in MeasureSystem::ALL {
        let r = verify_measure(&MeasureConfig::new(sys)).unwrap();
        passed &= r.passed;
        if sys == MeasureSystem::NegativeControl {
            parts.push(format!("{} min {:.2e} (> {:.0e})", sys.name(), r.min_abs_div(), r.threshold));
        } else {
            parts.push(format!("{} {:.1e}", sys.name(), r.max_abs_div()));
        }
    }
    Outcome::new(passed, format!("max |div| at 50 points, n ∈ {{3,4}}, ε ∈ {{−1,0.3,1,2}}: {}", parts.join(", ")))
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / hi.abs()
}

fn density_proportionality() -> Outcome {
    let d = 0.7;
    let mut ch = 0.0_f64;
    let mut sp = 0.0_f64;
    for n in 3..=5 {
        let mut r = rng(50 + n as u64);
        let spec = random_inertia(&mut r, InertiaFamily::ChOp, n, d).unwrap();
        let a = DVector::from_column_slice(spec.diagonal_params().unwrap());
        let ratios: Vec<f64> = (0..100)
            .map(|_| {
                let g = random_unit(&mut r, n);
                let q = g.as_vector().component_div(&a).dot(g.as_vector());
                density_nonrubber(&spec, d, &g).unwrap() / q.powf((n as f64 - 2.0) / 2.0)
            })
            .collect();
        ch = ch.max(spread(&ratios));
        for eps in [-1.0, 0.3, 1.0, 2.0] {
            let spec = random_inertia(&mut r, InertiaFamily::SpecOp, n, d).unwrap();
            let a = DVector::from_column_slice(spec.diagonal_params().unwrap());
            let ball = Ball::new(spec, eps, d).unwrap();
            let ratios: Vec<f64> = (0..100)
                .map(|_| {
                    let g = random_unit(&mut r, n);
                    let s = a.component_mul(g.as_vector()).dot(g.as_vector());
                    reduced::density_reduced_generic(&ball, &g).unwrap()
                        / s.powf((1.0 / (2.0 * eps) - 1.0) * (n as f64 - 2.0))
                })
                .collect();
            sp = sp.max(spread(&ratios));
        }
    }
    Outcome::new(
        ch < 1e-8 && sp < 1e-8,
        format!("relative spread over 100 γ, n ∈ {{3,4,5}}: ChOp {ch:.2e}, SpecOp {sp:.2e}"),
    )
}

fn hamiltonization() -> Outcome {
    let r = verify_hamiltonization_batch(&HamiltonizationConfig::default()).unwrap();
    let mut reparam = 0.0_f64;
    let mut ok = true;
    for n in [3, 4] {
        for eps in [-1.0, 0.3, 2.0] {
            let mut cfg = EquivalenceConfig::new(EquivalenceKind::Reparametrization, n, eps);
            cfg.samples = 3;
            let e = verify_equivalence(&cfg).unwrap();
            reparam = reparam.max(e.trajectory_error);
            ok &= e.passed;
        }
    }
    Outcome::new(
        r.passed && ok && reparam < 1e-5,
        format!(
            "pointwise residual {:.2e} over {} states x {} (n, ε); reparametrized γ(t) error {reparam:.2e} over t ∈ [0, 1]",
            r.max_residual(),
            r.samples,
            r.rows.len()
        ),
    )
}

/// `vec(x ∧ y)` in the orthonormal basis `E_i ∧ E_j`, `i < j`.
fn wedge_vec(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(x[i] * y[j] - x[j] * y[i]);
        }
    }
    DVector::from_vec(out)
}

/// Euler–Lagrange acceleration of `L = (1/2ε²)⟨𝐈(γ∧γ̇), γ∧γ̇⟩` restricted to
/// the sphere, from the quadratic form `L = ½ γ̇ᵀM(γ)γ̇`.
fn euler_lagrange(big: &DMatrix<f64>, eps: f64, g: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = g.len();
    let c = 1.0 / (eps * eps);
    let e = |a: usize| DVector::from_fn(n, |i, _| if i == a { 1.0 } else { 0.0 });
    let w: Vec<DVector<f64>> = (0..n).map(|a| wedge_vec(g, &e(a))).collect();
    let m = DMatrix::from_fn(n, n, |a, b| c * w[a].dot(&(big * &w[b])));
    let igv = big * wedge_vec(g, v);
    // ∂L/∂γ_a = c⟨e_a ∧ γ̇, 𝐈(γ ∧ γ̇)⟩ and Ṁγ̇ = c Σ_b (v ∧ e_a)·𝐈(γ ∧ γ̇)
    let dl = DVector::from_fn(n, |a, _| c * wedge_vec(&e(a), v).dot(&igv));
    let mdot_v = DVector::from_fn(n, |a, _| c * wedge_vec(v, &e(a)).dot(&igv));
    // orthonormal tangent basis from a QR of [γ | I]
    let mut stack = DMatrix::zeros(n, n + 1);
    stack.set_column(0, g);
    stack.view_mut((0, 1), (n, n)).copy_from(&DMatrix::identity(n, n));
    let q = stack.qr().q();
    let basis = q.columns(1, n - 1).into_owned();
    let lhs = basis.transpose() * &m * &basis;
    let rhs = basis.transpose() * (dl - mdot_v);
    let a = lhs.lu().solve(&rhs).unwrap();
    basis * a - g * v.norm_squared()
}

fn el_flow(big: &DMatrix<f64>, eps: f64, g0: &DVector<f64>, v0: &DVector<f64>, h: f64, t: f64) -> DVector<f64> {
    let n = g0.len();
    let f = |y: &DVector<f64>| {
        let g = y.rows(0, n).into_owned();
        let v = y.rows(n, n).into_owned();
        let acc = euler_lagrange(big, eps, &g, &v);
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&v);
        out.rows_mut(n, n).copy_from(&acc);
        out
    };
    let mut y = DVector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(g0);
    y.rows_mut(n, n).copy_from(v0);
    let steps = (t / h).round() as usize;
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &k1 * (h / 2.0)));
        let k3 = f(&(&y + &k2 * (h / 2.0)));
        let k4 = f(&(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y.rows(0, n).into_owned()
}

/// Largest `γ(t)` gap between the reduced flow and the Euler–Lagrange oracle.
fn reduced_vs_lagrange(eps: f64) -> f64 {
    let (h, t) = (1e-3, 1.0);
    let mut gap = 0.0_f64;
    for n in 3..=4 {
        let mut r = rng(70 + n as u64);
        let spec = random_inertia(&mut r, InertiaFamily::Generic, n, 0.6).unwrap();
        let ball = Ball::new(spec, eps, 0.6).unwrap();
        let big = ball.modified_matrix().clone();
        for _ in 0..2 {
            let g0 = random_unit(&mut r, n);
            let v0 = random_tangent(&mut r, &g0, 1.0);
            // p = ∂L/∂γ̇ = M(γ)γ̇
            let w: Vec<DVector<f64>> = (0..n)
                .map(|a| wedge_vec(g0.as_vector(), &DVector::from_fn(n, |i, _| if i == a { 1.0 } else { 0.0 })))
                .collect();
            let p0 = DVector::from_fn(n, |a, _| w[a].dot(&(&big * wedge_vec(g0.as_vector(), &v0))) / (eps * eps));
            let model = Model::new(SystemKind::ReducedGeneric, ball.clone()).unwrap();
            let y0 = model.pack(&p0, &g0, None).unwrap();
            let y = rk4_final(&model, &y0, h, t, false).unwrap();
            let oracle = el_flow(&big, eps, g0.as_vector(), &v0, h, t);
            gap = gap.max((model.gamma_of(&y) - oracle).amax());
        }
    }
    gap
}

fn curvature_degeneration() -> Outcome {
    let jk = reduced::jk_coefficient(0.5).unwrap();
    let gap = reduced_vs_lagrange(0.5);
    let control = reduced_vs_lagrange(0.3);
    Outcome::new(
        jk == 0.0 && gap < 1e-8 && control > 1e-4,
        format!("jk coefficient {jk:e} at ε=1/2; reduced vs Euler-Lagrange γ(t) gap {gap:.2e} (at ε=0.3 the gap is {control:.2e})"),
    )
}

fn formulation_equivalences() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for kind in [EquivalenceKind::RubberFormulations, EquivalenceKind::ReducedFormulations, EquivalenceKind::ReducedExtended] {
        let (mut field, mut traj) = (0.0_f64, 0.0_f64);
        for n in [3, 4] {
            for eps in [-1.0, 0.3, 1.0, 2.0] {
                let mut cfg = EquivalenceConfig::new(kind, n, eps);
                cfg.samples = 3;
                if kind == EquivalenceKind::RubberFormulations {
                    cfg.t_end = 5.0;
                }
                let r = verify_equivalence(&cfg).unwrap();
                passed &= r.passed;
                field = field.max(r.field_error);
                traj = traj.max(r.trajectory_error);
            }
        }
        parts.push(format!("{}: field {field:.1e}, trajectory {traj:.1e}", kind.name()));
    }
    Outcome::new(passed, parts.join("; "))
}

fn metric_limit() -> Outcome {
    let mut r = rng(90);
    let mut worst = 0.0_f64;
    for n in 3..=6 {
        for _ in 0..200 {
            let a = DVector::from_fn(n, |_, _| rand::Rng::random_range(&mut r, 0.5..3.0));
            let g = random_unit(&mut r, n);
            let v = random_tangent(&mut r, &g, 1.0);
            let m1 = reduced::metric_eval(&a, 1.0, &g, &v).unwrap();
            let m0 = reduced::metric_horizontal(&a, &g, &v).unwrap();
            worst = worst.max((m1 - m0).abs() / m0.abs().max(1.0));
        }
    }
    Outcome::new(worst < 1e-12, format!("max |ds²_(A,1) − ds²_A| {worst:.2e} over 800 tangent vectors, n ∈ 3..=6"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("energy conservation", energy_conservation),
        ("constraint preservation", constraint_preservation),
        ("3D integral suite", classical_integrals),
        ("invariant-measure divergence", invariant_measures),
        ("density proportionality", density_proportionality),
        ("Hamiltonization", hamiltonization),
        ("curvature degeneration at ε = 1/2", curvature_degeneration),
        ("formulation equivalences", formulation_equivalences),
        ("metric limit at ε = 1", metric_limit),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        if !out.passed {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} | {} [{:.1}s]",
            i + 1,
            name,
            if out.passed { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
