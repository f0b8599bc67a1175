use serde::{Deserialize, Serialize};

use crate::driver::{solve_with, IterationRecord, SolveStatus, Variant};
use crate::error::{Error, Result};
use crate::linalg::rank_tolerance;
use crate::oracle::{OracleConfig, OracleMode};
use crate::problem::{AlgoParams, BasisNormalizedProblem};

/// Only iterations with `μ` at or below this value enter the fit.
pub const FIT_MU_MAX: f64 = 1e-2;
pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares line `log κ = intercept + slope·log(1/μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit residuals in `log κ`.
    pub residual_rms: f64,
    pub points: usize,
}

/// Fits `log κ` against `log(1/μ)` over `(μ, κ)` pairs.
pub fn fit_log_slope(samples: &[(f64, f64)]) -> Result<SlopeFit> {
    let insufficient = Error::InsufficientData {
        points: samples.len(),
        required: MIN_FIT_POINTS,
    };
    if samples.len() < MIN_FIT_POINTS {
        return Err(insufficient);
    }
    if samples.iter().any(|&(mu, k)| !(mu > 0.0 && k > 0.0 && mu.is_finite() && k.is_finite())) {
        return Err(Error::Domain("slope fit needs positive finite (mu, kappa) pairs".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|&(mu, _)| -mu.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, k)| k.ln()).collect();
    let count = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / count;
    let y_mean = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all samples share one value of mu".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual_rms: (sse / count).sqrt(),
        points: samples.len(),
    })
}

/// `count` values spaced evenly in `log μ` from `hi` down to `lo`.
pub fn log_mu_grid(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (hi.ln(), lo.ln());
            (0..count)
                .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// One driver's contribution to the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningSeries {
    pub variant: Variant,
    pub status: SolveStatus,
    pub iterations: usize,
    /// `(μ, κ)` pairs that entered the fit.
    pub samples: Vec<(f64, f64)>,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningReport {
    /// `κ(Y)` from the preconditioned driver.
    pub preconditioned: ConditioningSeries,
    /// `κ(M_MNES)` from the baseline driver.
    pub baseline: ConditioningSeries,
    /// `baseline.fit.slope − preconditioned.fit.slope`.
    pub slope_gap: f64,
}

/// Picks, for every grid value `g ≤ FIT_MU_MAX`, the first record with
/// `μ ≤ g`. Each record is used at most once.
///
/// Records whose condition number is beyond what the SVD can resolve
/// (`σ_min` under the rank tolerance of an `m × m` matrix) are skipped: their
/// `κ` is rounding noise rather than a measurement.
pub fn sample_records(records: &[IterationRecord], mu_grid: &[f64], dim: usize) -> Vec<(f64, f64)> {
    let kappa_limit = 1.0 / rank_tolerance(dim, dim, 1.0);
    let usable: Vec<&IterationRecord> = records
        .iter()
        .filter(|r| r.mu <= FIT_MU_MAX && r.kappa_y.is_finite() && r.kappa_y < kappa_limit)
        .collect();
    let mut grid: Vec<f64> = mu_grid.iter().copied().filter(|&g| g <= FIT_MU_MAX).collect();
    grid.sort_by(|a, b| b.total_cmp(a));

    let mut taken: Vec<usize> = Vec::new();
    for g in grid {
        if let Some(r) = usable.iter().find(|r| r.mu <= g) {
            if !taken.contains(&r.iter) {
                taken.push(r.iter);
            }
        }
    }
    usable
        .iter()
        .filter(|r| taken.contains(&r.iter))
        .map(|r| (r.mu, r.kappa_y))
        .collect()
}

/// Solves `np` with both drivers and the exact oracle, then fits how fast
/// the oracle's condition number grows as `μ → 0`.
///
/// The two solves are independent and run on separate threads.
pub fn conditioning_experiment(
    np: &BasisNormalizedProblem,
    params: &AlgoParams,
    mu_grid: &[f64],
) -> Result<ConditioningReport> {
    let cfg = OracleConfig::new(OracleMode::Exact, params.eta, 0);
    let run = |variant: Variant| solve_with(np, params, &cfg, variant, &mut ());
    let (pre, base) = std::thread::scope(|scope| {
        let handle = scope.spawn(|| run(Variant::MnesBaseline));
        let pre = run(Variant::Preconditioned);
        let base = handle.join().expect("baseline solve panicked");
        (pre, base)
    });

    let series = |variant: Variant, outcome: crate::driver::SolveOutcome| -> Result<ConditioningSeries> {
        let samples = sample_records(&outcome.records, mu_grid, np.m());
        let fit = fit_log_slope(&samples)?;
        Ok(ConditioningSeries {
            variant,
            status: outcome.status,
            iterations: outcome.records.len(),
            samples,
            fit,
        })
    };
    let preconditioned = series(Variant::Preconditioned, pre?)?;
    let baseline = series(Variant::MnesBaseline, base?)?;
    let slope_gap = baseline.fit.slope - preconditioned.fit.slope;
    Ok(ConditioningReport {
        preconditioned,
        baseline,
        slope_gap,
    })
}
