use crate::error::{Error, Result};
use crate::linalg::{select_columns, singular_values, LuFactor, Matrix, SpdFactor, Vector};
use crate::problem::{BasisNormalizedProblem, IterateStats};

use super::PartitionedScaling;

/// The normalized preconditioned reduced augmented system `ΞΔy = ξ`.
///
/// With `B = A₁F₁^{-1/2}`, `H = BBᵀ + A₂D₂⁻¹A₂ᵀ`, the preconditioner
/// `Ĥ = ĥI` and `Ẑ = (1/ĥ)BᵀB + D₁`, the first block row of the
/// preconditioned system reads `YΔy = ξ′` with
///
/// ```text
/// G  = (1/ĥ) B Ẑ⁻¹ Bᵀ
/// Y  = (1/ĥ)H + G − G(1/ĥ)H
/// ξ′ = (1/ĥ)h − G(1/ĥ)h + (1/ĥ) B Ẑ⁻¹ F₁^{-1/2} (r_dc)₁
/// ```
///
/// and `Ξ = Y/‖Y‖₂`, `ξ = ξ′/‖Y‖₂`.
#[derive(Debug, Clone)]
pub struct RpRasSystem {
    pub b: Matrix,
    pub h_mat: Matrix,
    pub h: Vector,
    pub h_hat: f64,
    pub z_hat: Matrix,
    /// `(1/ĥ)BẐ⁻¹Bᵀ`; zero when the first partition is empty.
    pub g: Matrix,
    pub y: Matrix,
    pub y_norm: f64,
    pub xi_mat: Matrix,
    pub xi: Vector,
    pub xi_prime: Vector,
}

impl RpRasSystem {
    /// Exact solution of `ΞΔy = ξ` by LU.
    pub fn solve_exact(&self) -> Result<Vector> {
        LuFactor::new(&self.xi_mat)?.solve(&self.xi)
    }
}

/// Builds the RP-RAS at the iterate described by `stats` and `scaling`.
///
/// `r_dc = r_d − X⁻¹r_c` comes from the MNES build of the same iterate.
pub fn build_rpras(
    np: &BasisNormalizedProblem,
    stats: &IterateStats,
    scaling: &PartitionedScaling,
    r_dc: &Vector,
    gamma1: f64,
) -> Result<RpRasSystem> {
    let a = np.problem().a();
    let m = a.nrows();
    let k = scaling.size1();

    let a1 = select_columns(a, &scaling.idx1);
    let a2 = select_columns(a, &scaling.idx2);
    let f1_isqrt = scaling.f1.map(|f| 1.0 / f.sqrt());
    let mut b = a1;
    for (j, mut col) in b.column_iter_mut().enumerate() {
        col *= f1_isqrt[j];
    }
    let mut a2_scaled = a2.clone();
    for (j, mut col) in a2_scaled.column_iter_mut().enumerate() {
        col /= scaling.d2[j].sqrt();
    }
    let h_mat = &b * b.transpose() + &a2_scaled * a2_scaled.transpose();

    let rdc1 = Vector::from_iterator(k, scaling.idx1.iter().map(|&i| r_dc[i]));
    let rdc2 = Vector::from_iterator(scaling.idx2.len(), scaling.idx2.iter().map(|&i| r_dc[i]));
    let h = &stats.rp
        + &b * f1_isqrt.component_mul(&rdc1)
        + a2 * rdc2.component_div(&scaling.d2);

    let sigma0 = np.sigma_min_a();
    let h_hat = gamma1 * sigma0 * sigma0 / (stats.omega * stats.omega);
    if !(h_hat > 0.0 && h_hat.is_finite()) {
        return Err(Error::Domain(format!("preconditioner scale {h_hat} is not positive")));
    }

    let h_scaled = &h_mat / h_hat;
    let h_rhs = &h / h_hat;
    let (z_hat, g, correction) = if k == 0 {
        (Matrix::zeros(0, 0), Matrix::zeros(m, m), Vector::zeros(m))
    } else {
        let z_hat = Matrix::from_diagonal(&scaling.d1) + b.tr_mul(&b) / h_hat;
        let z_fac = SpdFactor::new(&z_hat)?;
        // Ẑ⁻¹Bᵀ, then G = (1/ĥ)B Ẑ⁻¹Bᵀ
        let zinv_bt = z_fac.solve_matrix(&b.transpose())?;
        let g = (&b * zinv_bt) / h_hat;
        let t = z_fac.solve(&f1_isqrt.component_mul(&rdc1))?;
        let correction = (&b * t) / h_hat;
        (z_hat, g, correction)
    };

    let y = &h_scaled + &g - &g * &h_scaled;
    let xi_prime = &h_rhs - &g * &h_rhs + correction;
    let y_norm = singular_values(&y)?.first().copied().unwrap_or(0.0);
    if !(y_norm > 0.0) {
        return Err(Error::Singular);
    }

    Ok(RpRasSystem {
        b,
        h_mat,
        h,
        h_hat,
        z_hat,
        g,
        xi_mat: &y / y_norm,
        xi: &xi_prime / y_norm,
        y,
        y_norm,
        xi_prime,
    })
}
