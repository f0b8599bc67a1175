//! Dense linear algebra and spectral utilities.
//!
//! Everything here works on `nalgebra` dynamic matrices. Singular values are
//! always reported in non-increasing order, and the "smallest nonzero"
//! singular value `σ₀` is decided by a relative rank tolerance (see
//! [`rank_tolerance`]), so the condition number `κ = σ₁ / σ₀` of any nonzero
//! matrix is finite, including rank-deficient and rectangular ones.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;
/// Dense real column vector used throughout the crate.
pub type Vector = DVector<f64>;

const SVD_MAX_ITERS: usize = 10_000;
const RANK_SAFETY: f64 = 100.0;
const SYMMETRY_TOL: f64 = 1e-12;

/// Extreme singular values of a matrix and the rank decision behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    /// Largest singular value `σ₁`.
    pub sigma_max: f64,
    /// Smallest singular value above `rank_tolerance` (`σ₀`).
    pub sigma_min_nonzero: f64,
    pub numeric_rank: usize,
    /// `σ₁ / σ₀`.
    pub kappa: f64,
    pub rank_tolerance: f64,
}

/// Threshold below which a singular value is treated as zero.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * sigma_max * f64::EPSILON * RANK_SAFETY
}

fn ensure_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("matrix has non-finite entries".into()))
    }
}

/// Singular values of `m`, sorted non-increasing; `min(rows, cols)` of them.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, SVD_MAX_ITERS)
        .ok_or(Error::DecompositionFailure)?;
    let mut values: Vec<f64> = svd.singular_values.iter().map(|v| v.abs()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `σ₁`, `σ₀`, numeric rank and `κ` of a nonzero matrix.
pub fn spectral_summary(m: &Matrix) -> Result<SpectralSummary> {
    let values = singular_values(m)?;
    summary_from_values(m.nrows(), m.ncols(), &values)
}

pub(crate) fn summary_from_values(
    rows: usize,
    cols: usize,
    values: &[f64],
) -> Result<SpectralSummary> {
    let sigma_max = values.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Err(Error::Degenerate(
            "spectral summary of a zero (or empty) matrix".into(),
        ));
    }
    let tol = rank_tolerance(rows, cols, sigma_max);
    let numeric_rank = values.iter().take_while(|&&v| v > tol).count();
    let sigma_min_nonzero = values[numeric_rank - 1];
    Ok(SpectralSummary {
        sigma_max,
        sigma_min_nonzero,
        numeric_rank,
        kappa: sigma_max / sigma_min_nonzero,
        rank_tolerance: tol,
    })
}

/// `σ_max / σ_min` over the full spectrum, for matrices that are nonsingular
/// by construction. Unlike [`SpectralSummary::kappa`] nothing is truncated,
/// so the value keeps growing past `1/ε_mach`; a zero `σ_min` gives `∞`.
pub fn condition_number(m: &Matrix) -> Result<f64> {
    let values = singular_values(m)?;
    match (values.first(), values.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => Ok(hi / lo),
        _ => Err(Error::Degenerate("condition number of a zero (or empty) matrix".into())),
    }
}

/// Largest absolute entry of `m - mᵀ`.
pub fn max_asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    pub fn new(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        ensure_finite(m)?;
        let scale = m.amax();
        let asymmetry = max_asymmetry(m);
        if asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let chol = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)?;
        if chol.l_dirty().diagonal().iter().any(|&d| !(d > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { chol })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        if rhs.len() != self.dim() {
            return Err(Error::Shape(format!(
                "rhs has length {}, matrix has dimension {}",
                rhs.len(),
                self.dim()
            )));
        }
        Ok(self.chol.solve(rhs))
    }

    pub fn solve_matrix(&self, rhs: &Matrix) -> Result<Matrix> {
        if rhs.nrows() != self.dim() {
            return Err(Error::Shape(format!(
                "rhs has {} rows, matrix has dimension {}",
                rhs.nrows(),
                self.dim()
            )));
        }
        Ok(self.chol.solve(rhs))
    }
}

/// Solve `m u = rhs` for symmetric positive definite `m`.
pub fn solve_spd(m: &Matrix, rhs: &Vector) -> Result<Vector> {
    SpdFactor::new(m)?.solve(rhs)
}

/// True if `m` is symmetric within tolerance and admits a Cholesky factor.
pub fn is_positive_definite(m: &Matrix) -> bool {
    SpdFactor::new(m).is_ok()
}

/// LU factor (partial pivoting) of a square nonsingular matrix.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: nalgebra::LU<f64, Dyn, Dyn>,
}

impl LuFactor {
    pub fn new(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        ensure_finite(m)?;
        let n = m.nrows();
        let lu = m.clone().lu();
        let diag = lu.u().diagonal();
        let big = diag.amax();
        let small = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
        if n > 0 && (big == 0.0 || small <= n as f64 * f64::EPSILON * big) {
            return Err(Error::Singular);
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        self.lu.solve(rhs).ok_or(Error::Singular)
    }

    pub fn solve_matrix(&self, rhs: &Matrix) -> Result<Matrix> {
        self.lu.solve(rhs).ok_or(Error::Singular)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.lu.try_inverse().ok_or(Error::Singular)
    }
}

/// Solve `m u = rhs` for square nonsingular `m`.
pub fn solve_general(m: &Matrix, rhs: &Vector) -> Result<Vector> {
    if rhs.len() != m.nrows() {
        return Err(Error::Shape(format!(
            "rhs has length {}, matrix has {} rows",
            rhs.len(),
            m.nrows()
        )));
    }
    LuFactor::new(m)?.solve(rhs)
}

/// Minimizer `l*` of `‖l·w − v‖₂` over the reals: `(wᵀv)/(wᵀw)`.
pub fn least_squares_scalar(w: &Vector, v: &Vector) -> Result<f64> {
    if w.len() != v.len() {
        return Err(Error::Shape(format!(
            "vectors have lengths {} and {}",
            w.len(),
            v.len()
        )));
    }
    let ww = w.dot(w);
    if ww == 0.0 {
        return Err(Error::Degenerate("least squares against a zero vector".into()));
    }
    Ok(w.dot(v) / ww)
}

/// Columns of `m` selected by `idx`, in the given order.
pub fn select_columns(m: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])])
}

/// Infinity norm of a vector (0 for an empty vector).
pub fn inf_norm(v: &Vector) -> f64 {
    v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}
