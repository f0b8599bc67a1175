//! The `pqipm` command line.
//!
//! Exit codes: 0 converged (or experiment finished), 2 infeasibility
//! detected, 3 iteration limit or precision failure, 1 usage, input or
//! output errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{error::ErrorKind, ArgGroup, Parser, ValueEnum};

use crate::diagnostics::{
    conditioning_experiment, estimate_query_cost, log_mu_grid, save_json, save_trace, CostInputs, SolveSummary,
    FIT_MU_MAX,
};
use crate::driver::{solve_with, IterationView, SolveStatus, Variant};
use crate::error::Result;
use crate::oracle::{OracleConfig, OracleMode};
use crate::problem::{
    basis_normalize, generate_degenerate_lo, generate_random_lo, load_problem, AlgoParams, LoProblem,
};

const DEFAULT_EPSILON: f64 = 1e-6;
/// The conditioning fit needs many iterations below `μ = 1e−2`.
const DEFAULT_EXPERIMENT_EPSILON: f64 = 1e-9;
const GRID_POINTS_PER_DECADE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Quantum,
    Iterative,
}

impl From<ModeArg> for OracleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => OracleMode::Exact,
            ModeArg::Quantum => OracleMode::SimulatedQuantum,
            ModeArg::Iterative => OracleMode::Iterative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentArg {
    Conditioning,
}

#[derive(Debug, Parser)]
#[command(name = "pqipm", version, about = "Inexact infeasible interior point solver for standard-form LPs")]
#[command(group(ArgGroup::new("source").required(true).args(["problem", "generate"])))]
struct Cli {
    /// Problem file (`m n`, then A row by row, then b, then c).
    #[arg(long, value_name = "PATH")]
    problem: Option<PathBuf>,
    /// Generate a random instance with m constraints and n variables.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    generate: Option<Vec<usize>>,
    /// Generate a degenerate instance instead.
    #[arg(long, requires = "generate")]
    degenerate: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Solve the basis-normalized normal equations without preconditioning.
    #[arg(long)]
    baseline: bool,
    /// Target precision [default: 1e-6, or 1e-9 for experiments].
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    gamma1: f64,
    /// Fix the infeasibility constant instead of deriving it from the start.
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    beta1: f64,
    #[arg(long, default_value_t = 0.9)]
    beta2: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Bound on the optimal set; generated instances default to their own.
    #[arg(long)]
    omega_star: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    summary: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with_all = ["trace", "baseline"])]
    experiment: Option<ExperimentArg>,
    /// Write 0 in the wall_time_us column so traces are reproducible.
    #[arg(long)]
    omit_timing: bool,
    /// Skip the per-iteration spectral certificate.
    #[arg(long)]
    no_certify: bool,
}

struct Instance {
    id: String,
    problem: LoProblem,
    omega_star_hint: Option<f64>,
}

fn load_instance(cli: &Cli) -> Result<Instance> {
    if let Some(path) = &cli.problem {
        return Ok(Instance {
            id: path.display().to_string(),
            problem: load_problem(path)?,
            omega_star_hint: None,
        });
    }
    let dims = cli.generate.as_deref().unwrap_or_default();
    let (m, n) = (dims[0], dims[1]);
    let (kind, g) = if cli.degenerate {
        ("degenerate", generate_degenerate_lo(m, n, cli.seed)?)
    } else {
        ("random", generate_random_lo(m, n, cli.seed)?)
    };
    Ok(Instance {
        id: format!("{kind}-{m}x{n}-seed{}", cli.seed),
        problem: g.problem,
        omega_star_hint: Some(g.omega_star_hint),
    })
}

fn params(cli: &Cli, inst: &Instance, epsilon: f64) -> AlgoParams {
    AlgoParams {
        epsilon,
        gamma1: cli.gamma1,
        gamma2_override: cli.gamma2,
        beta1: cli.beta1,
        beta2: cli.beta2,
        eta: cli.eta,
        omega_star: cli.omega_star.or(inst.omega_star_hint),
        max_iters: cli.max_iters,
        certify: !cli.no_certify,
        ..AlgoParams::default()
    }
}

fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::InfeasibilityDetected => 2,
        SolveStatus::IterationLimit | SolveStatus::PrecisionFailure => 3,
    }
}

fn solve(cli: &Cli, inst: &Instance) -> Result<i32> {
    let params = params(cli, inst, cli.epsilon.unwrap_or(DEFAULT_EPSILON));
    let np = basis_normalize(&inst.problem)?;
    let mode = OracleMode::from(cli.mode);
    let variant = if cli.baseline {
        Variant::MnesBaseline
    } else {
        Variant::Preconditioned
    };
    let oracle = OracleConfig::new(mode, params.eta, cli.seed);

    let mut omega_bar = params.resolve_omega_star(np.problem());
    let mut track = |v: &IterationView<'_>| omega_bar = omega_bar.max(v.next.omega());
    let mut outcome = solve_with(&np, &params, &oracle, variant, &mut track)?;
    if cli.omit_timing {
        outcome.records.iter_mut().for_each(|r| r.wall_time_us = 0);
    }

    if let Some(path) = &cli.trace {
        save_trace(path, &outcome.records)?;
    }
    let mut summary = SolveSummary::new(inst.id.clone(), mode, variant, cli.seed, &outcome);
    summary.query_cost = CostInputs::for_problem(&np, omega_bar, params.epsilon)
        .and_then(estimate_query_cost)
        .ok();
    if let Some(path) = &cli.summary {
        save_json(path, &summary)?;
    }
    println!(
        "{}: {:?} after {} iterations, mu = {:.3e}, infeasibility = {:.3e}, margin violations = {}",
        summary.problem_id,
        summary.status,
        summary.iterations,
        summary.final_mu,
        summary.final_infeasibility,
        summary.margin_violations
    );
    if let Some(msg) = &summary.message {
        println!("  {msg}");
    }
    Ok(exit_code(outcome.status))
}

fn experiment(cli: &Cli, inst: &Instance) -> Result<i32> {
    let epsilon = cli.epsilon.unwrap_or(DEFAULT_EXPERIMENT_EPSILON);
    let params = params(cli, inst, epsilon);
    let np = basis_normalize(&inst.problem)?;
    let lo = (epsilon * 0.1).min(FIT_MU_MAX);
    let count = (GRID_POINTS_PER_DECADE * (FIT_MU_MAX / lo).log10()).ceil() as usize + 1;
    let report = conditioning_experiment(&np, &params, &log_mu_grid(FIT_MU_MAX, lo, count))?;
    if let Some(path) = &cli.summary {
        save_json(path, &report)?;
    }
    for s in [&report.preconditioned, &report.baseline] {
        println!(
            "{:?}: slope {:.3} (rms {:.3}, {} points, {:?})",
            s.variant, s.fit.slope, s.fit.residual_rms, s.fit.points, s.status
        );
    }
    println!("slope gap {:.3}", report.slope_gap);
    Ok(0)
}

/// Parses `args` (including the program name) and runs the solver or the
/// experiment. Returns the process exit code.
pub fn run_solve_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let run = || -> Result<i32> {
        let inst = load_instance(&cli)?;
        match cli.experiment {
            Some(ExperimentArg::Conditioning) => experiment(&cli, &inst),
            None => solve(&cli, &inst),
        }
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
