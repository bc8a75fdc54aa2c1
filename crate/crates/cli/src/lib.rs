//! `chaplygin` command line: scenario runs and verification checks.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use chaplygin::harness::equivalence::{verify_equivalence, EquivalenceConfig, EquivalenceKind};
use chaplygin::harness::hamilton::{verify_hamiltonization_batch, HamiltonizationConfig};
use chaplygin::harness::measure::{verify_measure, MeasureConfig, MeasureSystem, FD_STEP};
use chaplygin::harness::monitor::CheckStatus;
use chaplygin::harness::output::{write_json, write_run};
use chaplygin::harness::sample::InertiaFamily;
use chaplygin::harness::scenario::{load_scenario, run_scenarios};
use chaplygin::harness::sweep::{run_sweep, worker_pool, workers_from_env, Pool, SweepConfig, WORKERS_ENV};
use chaplygin::harness::{IntegratorConfig, MonitorKind, SystemKind};
use chaplygin::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "chaplygin",
    version,
    about = "Chaplygin ball rolling over a sphere: scenario runs and verification checks",
    after_help = format!("Set {WORKERS_ENV} to fix the number of worker threads.")
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate scenario files; writes CSV, a monitor report and a summary per scenario.
    Run(RunArgs),
    /// Finite-difference Liouville check of the invariant measures.
    VerifyMeasure(MeasureArgs),
    /// Pointwise check that the reduced field is the time-rescaled geodesic flow.
    VerifyHamiltonization(HamArgs),
    /// Compare formulations of the same dynamics (default: the time reparametrization).
    VerifyEquivalence(EquivArgs),
    /// Energy and constraint checks over a grid of ε and inertia operators.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario JSON file(s).
    #[arg(long = "scenario", required = true, num_args = 1..)]
    scenarios: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Print only the verdict line per scenario.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// nonrubber-reduced, nonrubber-momentum, nonrubber-velocity, rubber,
    /// rubber-extended, reduced-generic, reduced-special, negative-control or all.
    #[arg(long, default_value = "all")]
    system: String,
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,0.3,1,2")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// generic, ch_op or spec_op (default depends on the system).
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0.7)]
    d: f64,
    #[arg(long, default_value_t = FD_STEP)]
    fd_step: f64,
    /// Write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HamArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,0.3,0.5,1,2")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.7)]
    d: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EquivArgs {
    /// reparametrization, rubber-formulations, reduced-formulations,
    /// reduced-extended or all.
    #[arg(long, default_value = "reparametrization")]
    kind: String,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.7)]
    d: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    system: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    eps: Vec<f64>,
    /// Explicit diagonal parameters, e.g. "1,2,3;1.5,2,2.5".
    #[arg(long)]
    a: Option<String>,
    #[arg(long, default_value_t = 2)]
    random_inertias: usize,
    #[arg(long, default_value = "spec_op")]
    family: String,
    #[arg(long, default_value_t = 0.7)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Exit code for a library error: numerical failures count as check
/// failures, everything else as a usage or configuration problem.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } | Error::Singular(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn code(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn cli_run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::VerifyMeasure(a) => cmd_measure(&a),
        Command::VerifyHamiltonization(a) => cmd_hamiltonization(&a),
        Command::VerifyEquivalence(a) => cmd_equivalence(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    };
    match result {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn pool() -> chaplygin::Result<Pool> {
    worker_pool(workers_from_env()?)
}

fn cmd_run(a: &RunArgs) -> chaplygin::Result<i32> {
    let scenarios = a
        .scenarios
        .iter()
        .map(|p| load_scenario(p))
        .collect::<chaplygin::Result<Vec<_>>>()?;
    let pool = pool()?;
    let mut worst = EXIT_PASS;
    for (path, res) in a.scenarios.iter().zip(run_scenarios(&scenarios, &pool)) {
        let run = match res {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                worst = worst.max(exit_code(&e));
                continue;
            }
        };
        let paths = write_run(&run, &a.out)?;
        println!(
            "{}: {} ({}, n = {}, eps = {}, {} samples to t = {})",
            run.name,
            verdict(run.report.passed),
            run.system,
            run.n,
            run.epsilon,
            run.trajectory.len(),
            run.trajectory.times.last().copied().unwrap_or(0.0)
        );
        if !a.quiet {
            for c in &run.report.checks {
                let kind = match c.kind {
                    MonitorKind::Integral => "rel drift",
                    MonitorKind::Residual => "max |r|",
                };
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Reported => "reported (not an integral here)",
                };
                println!("  {:<12} {kind} {:.3e}  tol {:.0e}  {status}", c.name, c.judged(), c.tolerance);
            }
            println!("  wrote {}", paths.csv.display());
        }
        if !run.report.passed {
            worst = worst.max(EXIT_FAIL);
        }
    }
    Ok(worst)
}

fn parse_family(s: &str) -> chaplygin::Result<InertiaFamily> {
    s.parse()
}

fn cmd_measure(a: &MeasureArgs) -> chaplygin::Result<i32> {
    let systems = MeasureSystem::parse_list(&a.system)?;
    let family = a.family.as_deref().map(parse_family).transpose()?;
    let mut reports = Vec::new();
    for system in systems {
        let mut cfg = MeasureConfig::new(system);
        cfg.dims = a.n.clone();
        cfg.epsilons = a.eps.clone();
        cfg.samples = a.samples;
        cfg.seed = a.seed;
        cfg.d = a.d;
        cfg.fd_step = a.fd_step;
        if let Some(f) = family {
            cfg.family = f;
        }
        let r = verify_measure(&cfg)?;
        if system == MeasureSystem::NegativeControl {
            println!(
                "{:<20} min |div| = {:.3e}  must exceed {:.0e}  {}",
                system.name(),
                r.min_abs_div(),
                r.threshold,
                verdict(r.passed)
            );
        } else {
            println!(
                "{:<20} max |div| = {:.3e}  threshold {:.0e}  {}",
                system.name(),
                r.max_abs_div(),
                r.threshold,
                verdict(r.passed)
            );
        }
        for row in &r.rows {
            println!(
                "    n = {}  eps = {:>5}  max {:.3e}  min {:.3e}",
                row.n, row.epsilon, row.max_abs_div, row.min_abs_div
            );
        }
        reports.push(r);
    }
    if let Some(p) = &a.json {
        write_json(p, &reports)?;
    }
    Ok(code(reports.iter().all(|r| r.passed)))
}

fn cmd_hamiltonization(a: &HamArgs) -> chaplygin::Result<i32> {
    let cfg = HamiltonizationConfig {
        dims: a.n.clone(),
        epsilons: a.eps.clone(),
        samples: a.samples,
        d: a.d,
        seed: a.seed,
        ..Default::default()
    };
    let r = verify_hamiltonization_batch(&cfg)?;
    for row in &r.rows {
        println!("n = {}  eps = {:>5}  max residual {:.3e}", row.n, row.epsilon, row.max_residual);
    }
    println!(
        "hamiltonization: max residual {:.3e} over {} states per case, threshold {:.0e}  {}",
        r.max_residual(),
        r.samples,
        r.threshold,
        verdict(r.passed)
    );
    if let Some(p) = &a.json {
        write_json(p, &r)?;
    }
    Ok(code(r.passed))
}

fn cmd_equivalence(a: &EquivArgs) -> chaplygin::Result<i32> {
    let kinds: Vec<EquivalenceKind> = if a.kind == "all" {
        EquivalenceKind::ALL.to_vec()
    } else {
        vec![a.kind.parse()?]
    };
    let mut reports = Vec::new();
    for kind in kinds {
        for &n in &a.n {
            for &eps in &a.eps {
                let mut cfg = EquivalenceConfig::new(kind, n, eps);
                cfg.samples = a.samples;
                cfg.h = a.h;
                cfg.t_end = a.t_end;
                cfg.seed = a.seed;
                cfg.d = a.d;
                let r = verify_equivalence(&cfg)?;
                println!(
                    "{:<21} n = {n}  eps = {eps:>5}  field {:.3e} (tol {:.0e})  trajectory {:.3e} (tol {:.0e})  {}",
                    kind.name(),
                    r.field_error,
                    r.field_threshold,
                    r.trajectory_error,
                    r.trajectory_threshold,
                    verdict(r.passed)
                );
                reports.push(r);
            }
        }
    }
    if let Some(p) = &a.json {
        write_json(p, &reports)?;
    }
    Ok(code(reports.iter().all(|r| r.passed)))
}

fn parse_a_grid(s: &str) -> chaplygin::Result<Vec<Vec<f64>>> {
    s.split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|g| {
            g.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("--a: cannot parse '{x}' as a number")))
                })
                .collect()
        })
        .collect()
}

fn cmd_sweep(a: &SweepArgs) -> chaplygin::Result<i32> {
    let system: SystemKind = a.system.parse()?;
    let mut cfg = SweepConfig::new(system, a.n, a.eps.clone());
    if let Some(s) = &a.a {
        cfg.a_grid = parse_a_grid(s)?;
    }
    cfg.random_inertias = a.random_inertias;
    cfg.family = parse_family(&a.family)?;
    cfg.d = a.d;
    cfg.scale = a.scale;
    cfg.integrator = IntegratorConfig::rk4(a.h, a.t_end);
    cfg.seed = a.seed;
    let r = run_sweep(&cfg, &pool()?)?;
    for row in &r.rows {
        println!(
            "eps = {:>5}  inertia {}  energy drift {:.3e}  worst {} at {:.2e} x tol  {}",
            row.epsilon,
            row.inertia_index,
            row.energy_rel_drift,
            row.worst_check,
            row.worst_ratio,
            verdict(row.passed)
        );
    }
    println!("sweep {} n = {}: {} points  {}", system, a.n, r.rows.len(), verdict(r.passed));
    if let Some(p) = &a.json {
        write_json(p, &r)?;
    }
    Ok(code(r.passed))
}
