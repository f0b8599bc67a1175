use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{select_columns, singular_values, summary_from_values, Matrix};
use crate::problem::{BasisNormalizedProblem, IterateStats};

use super::{MnesSystem, PartitionedScaling, RpRasSystem};

/// A signed, relative distance to a proven bound.
///
/// `value = (bound − observed)/max(1, |bound|)` for upper bounds and
/// `(observed − bound)/max(1, |bound|)` for lower bounds, so a value
/// `≥ −1e−9` means the bound holds. `None` marks a bound that does not apply
/// at this iterate (empty first partition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub value: Option<f64>,
}

/// Spectral quantities of one iteration and their margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub mu: f64,
    pub kappa_y: f64,
    /// `NaN` when the first partition is empty.
    pub kappa_zhat: f64,
    pub kappa_mnes: f64,
    pub kappa_d: f64,
    /// `κ_A³κ_D^{1.5}`, the a priori bound on `κ(M_MNES M_B⁻¹)`; informational.
    pub kappa_w_bound: f64,
    pub sigma0_y: f64,
    pub sigma1_y: f64,
    pub sigma0_zhat: f64,
    pub sigma1_zhat: f64,
    pub sigma0_g: f64,
    pub sigma1_g: f64,
    pub sigma0_acal: f64,
    pub sigma1_acal: f64,
    pub margins: Vec<Margin>,
}

impl SpectralCertificate {
    /// Smallest applicable margin, `None` if no bound applied.
    pub fn worst_margin(&self) -> Option<f64> {
        self.margins
            .iter()
            .filter_map(|m| m.value)
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Margins below `-tol` (or non-finite).
    pub fn violations(&self, tol: f64) -> Vec<&Margin> {
        self.margins
            .iter()
            .filter(|m| m.value.is_some_and(|v| !(v >= -tol)))
            .collect()
    }
}

fn rel(diff: f64, bound: f64) -> f64 {
    diff / bound.abs().max(1.0)
}

struct Margins(Vec<Margin>);

impl Margins {
    fn lower(&mut self, name: &str, observed: Option<f64>, bound: f64) {
        let value = observed.map(|o| rel(o - bound, bound));
        self.0.push(Margin { name: name.into(), value });
    }

    fn upper(&mut self, name: &str, observed: Option<f64>, bound: f64) {
        let value = observed.map(|o| rel(bound - o, bound));
        self.0.push(Margin { name: name.into(), value });
    }
}

/// Smallest and largest singular value of a matrix that is nonsingular by
/// construction.
fn full_extremes(m: &Matrix) -> Result<(f64, f64)> {
    let values = singular_values(m)?;
    Ok(match (values.last(), values.first()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    })
}

fn matrix_extremes(m: &Matrix) -> Result<(f64, f64)> {
    let values = singular_values(m)?;
    if values.is_empty() {
        return Ok((0.0, 0.0));
    }
    let s = summary_from_values(m.nrows(), m.ncols(), &values);
    Ok(match s {
        Ok(s) => (s.sigma_min_nonzero, s.sigma_max),
        Err(_) => (0.0, 0.0),
    })
}

/// Evaluates the diagonal-scaling, `G`, `𝒜`, `Y` and `Ẑ` bounds at one
/// iterate. The bounds are theorems for iterates inside the neighborhood, so
/// every margin should be nonnegative up to roundoff; violations are
/// recorded, never raised.
pub fn spectral_certificate(
    np: &BasisNormalizedProblem,
    sys: &RpRasSystem,
    mnes: &MnesSystem,
    scaling: &PartitionedScaling,
    stats: &IterateStats,
    gamma1: f64,
) -> Result<SpectralCertificate> {
    let n = scaling.d_full.len() as f64;
    let mu = stats.mu;
    let omega2 = stats.omega * stats.omega;
    let h_hat = sys.h_hat;
    let spread = (1.0 - gamma1) * n + gamma1;
    let sigma1_a = np.sigma_max_a();
    let empty = scaling.size1() == 0;
    let applies = |v: f64| if empty { None } else { Some(v) };

    let mut out = Margins(Vec::new());

    // diagonal scaling
    let d1_min = scaling.d1.iter().copied().fold(f64::INFINITY, f64::min);
    let d1_max = scaling.d1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f1_min = scaling.f1.iter().copied().fold(f64::INFINITY, f64::min);
    let f1_max = scaling.f1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.lower("d1_lower", applies(d1_min), gamma1 * mu / omega2);
    out.upper("d1_upper", applies(d1_max), 1.0);
    out.lower("f1_lower", applies(f1_min), gamma1 * mu / omega2 + 1.0);
    out.upper("f1_upper", applies(f1_max), 2.0);
    let has2 = !scaling.idx2.is_empty();
    let d2_min = scaling.d2.iter().copied().fold(f64::INFINITY, f64::min);
    let d2_max = scaling.d2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.lower("d2_lower", has2.then_some(d2_min), gamma1 / spread);
    out.upper("d2_upper", has2.then_some(d2_max), omega2 / (gamma1 * mu));

    // G
    let a1 = select_columns(np.problem().a(), &scaling.idx1);
    let (sigma0_a1, sigma1_a1) = matrix_extremes(&a1)?;
    let (sigma0_g, sigma1_g) = if empty { (0.0, 0.0) } else { matrix_extremes(&sys.g)? };
    out.lower(
        "g_sigma_min",
        applies(sigma0_g),
        1.0 / (1.0 + 2.0 * h_hat / (sigma0_a1 * sigma0_a1)),
    );
    out.upper(
        "g_sigma_max",
        applies(sigma1_g),
        1.0 / (1.0 + h_hat * gamma1 * mu / (omega2 * sigma1_a1 * sigma1_a1)),
    );

    // 𝒜, through its orthogonal similarity with H/ĥ
    let (sigma0_acal, sigma1_acal) = full_extremes(&(&sys.h_mat / h_hat))?;
    let acal_upper = spread / (gamma1 * h_hat) * sigma1_a * sigma1_a;
    out.lower("acal_sigma_min", Some(sigma0_acal), mu);
    out.upper("acal_sigma_max", Some(sigma1_acal), acal_upper);

    // Y
    let (sigma0_y, sigma1_y) = full_extremes(&sys.y)?;
    let y_lower = (sigma0_g * (1.0 - sigma1_g) + mu * (1.0 - sigma1_g).powi(2)).min(mu);
    out.lower("y_sigma_min", Some(sigma0_y), y_lower);
    out.upper("y_sigma_max", Some(sigma1_y), 1.0 + acal_upper);

    // Ẑ
    let (sigma0_zhat, sigma1_zhat) = if empty { (0.0, 0.0) } else { full_extremes(&sys.z_hat)? };
    let kappa_zhat = if empty { f64::NAN } else { sigma1_zhat / sigma0_zhat };
    out.lower("zhat_sigma_min", applies(sigma0_zhat), gamma1 * mu / omega2);
    out.upper("zhat_sigma_max", applies(sigma1_zhat), 1.0 + sigma1_a1 * sigma1_a1 / h_hat);
    out.upper(
        "zhat_kappa",
        applies(kappa_zhat),
        omega2 / (gamma1 * mu) * (1.0 + sigma1_a * sigma1_a / h_hat),
    );

    let (s0_mnes, s1_mnes) = full_extremes(&mnes.m_mnes)?;
    let d_max = scaling.d_full.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d_min = scaling.d_full.iter().copied().fold(f64::INFINITY, f64::min);
    let kappa_d = d_max / d_min;

    Ok(SpectralCertificate {
        mu,
        kappa_y: sigma1_y / sigma0_y,
        kappa_zhat,
        kappa_mnes: s1_mnes / s0_mnes,
        kappa_d,
        kappa_w_bound: np.kappa_a().powi(3) * kappa_d.powf(1.5),
        sigma0_y,
        sigma1_y,
        sigma0_zhat,
        sigma1_zhat,
        sigma0_g,
        sigma1_g,
        sigma0_acal,
        sigma1_acal,
        margins: out.0,
    })
}
