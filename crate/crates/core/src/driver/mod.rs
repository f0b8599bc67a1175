//! The inexact infeasible interior point loop.
//!
//! Both drivers start from `(ω*e, 0, ω*e)`, keep every iterate inside the
//! neighborhood `𝒩(γ₁, γ₂)` with `γ₂ = max{1, ‖(r_p⁰, r_d⁰)‖₂/μ⁰}`, and stop
//! when `xᵀs ≤ nε` and `‖(r_p, r_d)‖₂ ≤ ε`. They differ only in the linear
//! system handed to the oracle:
//!
//! * [`Variant::Preconditioned`] solves the normalized preconditioned
//!   system `ΞΔy = ξ`, whose condition number grows like `1/μ`;
//! * [`Variant::MnesBaseline`] solves `M_MNES z = v_MNES` directly, whose
//!   condition number grows like `1/μ²` on degenerate problems.

mod direction;
mod line_search;

pub use direction::{direction_from_dy, StepDirection};
pub use line_search::{line_search, max_positive_step, step_is_admissible, GRID_POINTS};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, Vector};
use crate::newton::{
    build_mnes, build_rpras, build_scaling, partition, spectral_certificate, MnesSystem, PartitionedScaling,
    RpRasSystem, SpectralCertificate,
};
use crate::oracle::{Oracle, OracleConfig, OracleOutput, OracleTarget};
use crate::problem::{
    eps_approximate_with, AlgoParams, BasisNormalizedProblem, Iterate, IterateStats, Neighborhood,
};

/// Number of times the oracle is retried with a halved `ε_q`.
pub const PRECISION_RETRIES: usize = 3;

/// Which system the oracle solves each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Preconditioned,
    MnesBaseline,
}

/// One row of the iteration trace.
///
/// `mu`, the residual norms and the condition numbers describe the iterate
/// the Newton system was built at; `alpha` is the step taken from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub mu: f64,
    pub rp_norm: f64,
    pub rd_norm: f64,
    pub alpha: f64,
    pub eps_q: f64,
    pub s_nu_inf: f64,
    /// `κ(Y)`; `κ(M_MNES)` for the baseline.
    #[serde(rename = "kappa_Y")]
    pub kappa_y: f64,
    /// `NaN` when the first partition is empty or for the baseline.
    #[serde(rename = "kappa_Zhat")]
    pub kappa_zhat: f64,
    #[serde(rename = "kappa_MNES")]
    pub kappa_mnes: f64,
    pub partition_size_1: usize,
    pub wall_time_us: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    InfeasibilityDetected,
    IterationLimit,
    PrecisionFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Final iterate in the caller's column order.
    pub final_iterate: Iterate,
    pub final_mu: f64,
    pub final_infeasibility: f64,
    pub records: Vec<IterationRecord>,
    /// Smallest certificate margin over all iterations (`None` if nothing
    /// was certified).
    pub worst_margin: Option<f64>,
    /// Number of certificate margins below `−1e−9`.
    pub margin_violations: usize,
    pub omega_star: f64,
    pub gamma2: f64,
    /// Cause of a `PrecisionFailure`.
    pub message: Option<String>,
}

/// Everything computed in one iteration, handed to a [`SolveObserver`].
pub struct IterationView<'a> {
    pub np: &'a BasisNormalizedProblem,
    pub iter: usize,
    /// Current iterate, in the column order of `np.problem()`.
    pub iterate: &'a Iterate,
    pub stats: &'a IterateStats,
    pub scaling: &'a PartitionedScaling,
    pub mnes: &'a MnesSystem,
    /// Only for [`Variant::Preconditioned`].
    pub rpras: Option<&'a RpRasSystem>,
    pub certificate: Option<&'a SpectralCertificate>,
    pub oracle: &'a OracleOutput,
    pub direction: &'a StepDirection,
    pub alpha: f64,
    pub next: &'a Iterate,
    pub neighborhood: &'a Neighborhood,
    pub params: &'a AlgoParams,
    pub record: &'a IterationRecord,
}

/// Hook called once per accepted step.
pub trait SolveObserver {
    fn on_iteration(&mut self, view: &IterationView<'_>);
}

impl SolveObserver for () {
    fn on_iteration(&mut self, _: &IterationView<'_>) {}
}

impl<F: FnMut(&IterationView<'_>)> SolveObserver for F {
    fn on_iteration(&mut self, view: &IterationView<'_>) {
        self(view)
    }
}

/// The preconditioned driver.
pub fn ipm_solve(np: &BasisNormalizedProblem, params: &AlgoParams, oracle: &OracleConfig) -> Result<SolveOutcome> {
    solve_with(np, params, oracle, Variant::Preconditioned, &mut ())
}

/// The baseline driver solving the MNES directly.
pub fn ipm_solve_mnes_baseline(
    np: &BasisNormalizedProblem,
    params: &AlgoParams,
    oracle: &OracleConfig,
) -> Result<SolveOutcome> {
    solve_with(np, params, oracle, Variant::MnesBaseline, &mut ())
}

/// Runs one solve. Invalid parameters are errors; numerical trouble during
/// the run ends it with [`SolveStatus::PrecisionFailure`].
pub fn solve_with(
    np: &BasisNormalizedProblem,
    params: &AlgoParams,
    oracle_cfg: &OracleConfig,
    variant: Variant,
    observer: &mut dyn SolveObserver,
) -> Result<SolveOutcome> {
    params.validate()?;
    if oracle_cfg.eta != params.eta {
        return Err(Error::InvalidParameter(format!(
            "oracle eta {} differs from driver eta {}",
            oracle_cfg.eta, params.eta
        )));
    }
    let p = np.problem();
    let (m, n) = (p.m(), p.n());
    let omega_star = params.resolve_omega_star(p);
    let mut it = Iterate::new(Vector::from_element(n, omega_star), Vector::zeros(m), Vector::from_element(n, omega_star));
    let stats0 = IterateStats::compute(p, &it)?;
    let gamma2 = params
        .gamma2_override
        .unwrap_or_else(|| (stats0.infeas_norm / stats0.mu).max(1.0));
    let nbhd = Neighborhood::new(params.gamma1, gamma2)?;
    let mut oracle = Oracle::new(oracle_cfg.clone());

    let mut run = Run {
        records: Vec::new(),
        worst_margin: None,
        margin_violations: 0,
    };
    let finish = |run: Run, status: SolveStatus, it: &Iterate, message: Option<String>| -> Result<SolveOutcome> {
        let stats = IterateStats::compute(p, it)?;
        Ok(SolveOutcome {
            status,
            final_iterate: np.to_original(it),
            final_mu: stats.mu,
            final_infeasibility: stats.infeas_norm,
            records: run.records,
            worst_margin: run.worst_margin,
            margin_violations: run.margin_violations,
            omega_star,
            gamma2,
            message,
        })
    };

    for k in 0..params.max_iters {
        let stats = IterateStats::compute(p, &it)?;
        if eps_approximate_with(&it, &stats, params.epsilon) {
            return finish(run, SolveStatus::Converged, &it, None);
        }
        let started = Instant::now();
        let step = match iterate_once(np, params, &nbhd, &mut oracle, variant, &it, &stats) {
            Ok(step) => step,
            Err(e) => return finish(run, SolveStatus::PrecisionFailure, &it, Some(e.to_string())),
        };
        let next = it.step(step.alpha, &step.direction.dx, &step.direction.dy, &step.direction.ds);
        let record = IterationRecord {
            iter: k,
            mu: stats.mu,
            rp_norm: stats.rp.norm(),
            rd_norm: stats.rd.norm(),
            alpha: step.alpha,
            eps_q: step.output.eps_q_applied,
            s_nu_inf: step.direction.s_nu_inf,
            kappa_y: step.kappa_y,
            kappa_zhat: step.kappa_zhat,
            kappa_mnes: step.kappa_mnes,
            partition_size_1: step.scaling.size1(),
            wall_time_us: started.elapsed().as_micros() as u64,
        };
        if let Some(cert) = &step.certificate {
            if let Some(w) = cert.worst_margin() {
                run.worst_margin = Some(run.worst_margin.map_or(w, |old: f64| old.min(w)));
            }
            run.margin_violations += cert.violations(1e-9).len();
        }
        observer.on_iteration(&IterationView {
            np,
            iter: k,
            iterate: &it,
            stats: &stats,
            scaling: &step.scaling,
            mnes: &step.mnes,
            rpras: step.rpras.as_ref(),
            certificate: step.certificate.as_ref(),
            oracle: &step.output,
            direction: &step.direction,
            alpha: step.alpha,
            next: &next,
            neighborhood: &nbhd,
            params,
            record: &record,
        });
        run.records.push(record);
        it = next;
        if it.omega() > params.resolve_infeasibility_factor(n) * omega_star {
            return finish(run, SolveStatus::InfeasibilityDetected, &it, None);
        }
    }

    let stats = IterateStats::compute(p, &it)?;
    let status = if eps_approximate_with(&it, &stats, params.epsilon) {
        SolveStatus::Converged
    } else {
        SolveStatus::IterationLimit
    };
    finish(run, status, &it, None)
}

struct Run {
    records: Vec<IterationRecord>,
    worst_margin: Option<f64>,
    margin_violations: usize,
}

struct Step {
    scaling: PartitionedScaling,
    mnes: MnesSystem,
    rpras: Option<RpRasSystem>,
    certificate: Option<SpectralCertificate>,
    output: OracleOutput,
    direction: StepDirection,
    alpha: f64,
    kappa_y: f64,
    kappa_zhat: f64,
    kappa_mnes: f64,
}

fn iterate_once(
    np: &BasisNormalizedProblem,
    params: &AlgoParams,
    nbhd: &Neighborhood,
    oracle: &mut Oracle,
    variant: Variant,
    it: &Iterate,
    stats: &IterateStats,
) -> Result<Step> {
    let p = np.problem();
    let part = partition(&it.x, stats.mu, params.gamma1);
    let scaling = build_scaling(it, &part)?;
    let mnes = build_mnes(np, it, stats, params.beta1)?;

    let (rpras, certificate, kappa_y, kappa_zhat, kappa_mnes) = match variant {
        Variant::Preconditioned => {
            let sys = build_rpras(np, stats, &scaling, &mnes.r_dc, params.gamma1)?;
            let (cert, ky, kz, km) = if params.certify {
                let c = spectral_certificate(np, &sys, &mnes, &scaling, stats, params.gamma1)?;
                let kappas = (c.kappa_y, c.kappa_zhat, c.kappa_mnes);
                (Some(c), kappas.0, kappas.1, kappas.2)
            } else {
                let kz = if scaling.size1() == 0 {
                    f64::NAN
                } else {
                    condition_number(&sys.z_hat)?
                };
                (None, condition_number(&sys.y)?, kz, condition_number(&mnes.m_mnes)?)
            };
            (Some(sys), cert, ky, kz, km)
        }
        Variant::MnesBaseline => {
            let km = condition_number(&mnes.m_mnes)?;
            (None, None, km, f64::NAN, km)
        }
    };

    let target = match &rpras {
        Some(sys) => OracleTarget::RpRas(sys),
        None => OracleTarget::Mnes,
    };
    let mut shrink = 1.0;
    let mut attempt = 0;
    let output = loop {
        match oracle.solve_shrunk(target, &mnes, stats.mu, p.n(), shrink) {
            Ok(out) => break out,
            Err(Error::PrecisionNotMet { .. }) if attempt < PRECISION_RETRIES => {
                attempt += 1;
                shrink *= 0.5;
            }
            Err(e) => return Err(e),
        }
    };

    let direction = direction_from_dy(p.a(), &output.delta_y, &mnes, it, stats);
    let alpha = line_search(p, it, &direction, nbhd, params.beta2)?;
    Ok(Step {
        scaling,
        mnes,
        rpras,
        certificate,
        output,
        direction,
        alpha,
        kappa_y,
        kappa_zhat,
        kappa_mnes,
    })
}
