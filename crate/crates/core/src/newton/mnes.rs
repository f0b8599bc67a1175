use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::problem::{BasisNormalizedProblem, Iterate, IterateStats};

/// Normal equations `M_NES Δy = AD⁻¹r_dc + r_p` and the basis-rescaled
/// system `M_MNES z = v_MNES` with `Δy = M_B z`.
#[derive(Debug, Clone)]
pub struct MnesSystem {
    /// `AD⁻¹Aᵀ`.
    pub m_nes: Matrix,
    /// `AD⁻¹r_dc + r_p`.
    pub nes_rhs: Vector,
    /// `A_B⁻ᵀD_B^{1/2}`.
    pub m_b: Matrix,
    /// `D_B^{-1/2}A_Bᵀ`.
    pub m_b_inv: Matrix,
    /// `M_BᵀM_NES M_B`.
    pub m_mnes: Matrix,
    pub v_mnes: Vector,
    /// `M_MNES M_B⁻¹`, the map from `Δy` to `M_MNES z`.
    pub w: Matrix,
    pub r_c: Vector,
    pub r_dc: Vector,
    pub d_b: Vector,
    pub d_n: Vector,
}

impl MnesSystem {
    /// `z = M_B⁻¹Δy`.
    pub fn z_from_dy(&self, dy: &Vector) -> Vector {
        &self.m_b_inv * dy
    }

    /// `Δy = M_B z`.
    pub fn dy_from_z(&self, z: &Vector) -> Vector {
        &self.m_b * z
    }

    /// `r = M_MNES M_B⁻¹Δy − v_MNES`.
    pub fn residual(&self, dy: &Vector) -> Vector {
        &self.w * dy - &self.v_mnes
    }
}

/// Builds NES and MNES at `it`. The iterate is in the column order of
/// `np.problem()`, so the first `m` columns are the basis.
pub fn build_mnes(
    np: &BasisNormalizedProblem,
    it: &Iterate,
    stats: &IterateStats,
    beta1: f64,
) -> Result<MnesSystem> {
    if !it.is_interior() {
        return Err(Error::Domain("MNES needs an interior iterate".into()));
    }
    let (m, n) = (np.m(), np.n());
    let a = np.problem().a();

    let xs = it.x.component_mul(&it.s);
    let r_c = Vector::from_element(n, beta1 * stats.mu) - xs;
    let r_dc = &stats.rd - r_c.component_div(&it.x);
    let d = it.s.component_div(&it.x);
    let d_inv = d.map(|v| 1.0 / v);

    // M_NES = (AD^{-1/2})(AD^{-1/2})ᵀ
    let mut a_scaled = a.clone();
    for (j, mut col) in a_scaled.column_iter_mut().enumerate() {
        col *= d_inv[j].sqrt();
    }
    let m_nes = &a_scaled * a_scaled.transpose();
    let nes_rhs = a * d_inv.component_mul(&r_dc) + &stats.rp;

    let d_b = d.rows(0, m).into_owned();
    let d_n = d.rows(m, n - m).into_owned();
    let sqrt_db = d_b.map(f64::sqrt);

    let mut m_b = np.basis_inverse().transpose();
    for (j, mut col) in m_b.column_iter_mut().enumerate() {
        col *= sqrt_db[j];
    }
    let a_b = a.columns(0, m);
    let mut m_b_inv = a_b.transpose();
    for (i, mut row) in m_b_inv.row_iter_mut().enumerate() {
        row /= sqrt_db[i];
    }

    // M_MNES = I + C Cᵀ with C = D_B^{1/2} Â_N D_N^{-1/2}
    let mut c = np.a_hat().columns(m, n - m).into_owned();
    for (i, mut row) in c.row_iter_mut().enumerate() {
        row *= sqrt_db[i];
    }
    for (j, mut col) in c.column_iter_mut().enumerate() {
        col /= d_n[j].sqrt();
    }
    let m_mnes = Matrix::identity(m, m) + &c * c.transpose();

    let v_mnes = m_b.tr_mul(&nes_rhs);
    let w = &m_mnes * &m_b_inv;

    Ok(MnesSystem {
        m_nes,
        nes_rhs,
        m_b,
        m_b_inv,
        m_mnes,
        v_mnes,
        w,
        r_c,
        r_dc,
        d_b,
        d_n,
    })
}
