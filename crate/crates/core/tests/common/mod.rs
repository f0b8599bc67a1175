//! Checks shared by the property suite and the acceptance runner.
//!
//! Each check draws its matrices from `seed`, tests one singular-value
//! inequality against the crate's SVD and returns a description of the first
//! violation.

#![allow(dead_code)]

use pqipm::linalg::{singular_values, spectral_summary, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIGMA_TOL: f64 = 1e-9;
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 12;

pub type Check = fn(u64) -> Result<(), String>;

pub const APPENDIX_CHECKS: [(&str, Check); 6] = [
    ("interlacing under a rank-k update", interlacing),
    ("Schur complement spectrum", schur_complement),
    ("largest singular value of a product", product_upper),
    ("smallest nonzero singular value times a diagonal", product_lower),
    ("zero padding", zero_padding),
    ("permutation invariance", permutation_invariance),
];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dim(rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(MIN_DIM..=MAX_DIM)
}

fn dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn sigma(m: &Matrix) -> Vec<f64> {
    singular_values(m).expect("svd")
}

/// `σ₀` and `σ₁` with the crate's rank convention.
fn extremes(m: &Matrix) -> (f64, f64) {
    let s = spectral_summary(m).expect("nonzero matrix");
    (s.sigma_min_nonzero, s.sigma_max)
}

fn le(a: f64, b: f64, what: &str) -> Result<(), String> {
    if a <= b + SIGMA_TOL {
        Ok(())
    } else {
        Err(format!("{what}: {a:e} > {b:e}"))
    }
}

fn eq(a: f64, b: f64, what: &str) -> Result<(), String> {
    if (a - b).abs() <= SIGMA_TOL {
        Ok(())
    } else {
        Err(format!("{what}: {a:e} != {b:e}"))
    }
}

/// Positive semidefinite `M₁ = GGᵀ` and rank-`k` `M₂ = HHᵀ`:
/// `σᵢ(M₁+M₂) ≥ σᵢ(M₁)` and `σ_{i+k}(M₁+M₂) ≤ σᵢ(M₁)`.
pub fn interlacing(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = dim(&mut r);
    let k = r.random_range(1..n);
    let inner = r.random_range(1..=n);
    let g = dense(&mut r, n, inner);
    let h = dense(&mut r, n, k);
    let m1 = &g * g.transpose();
    let m2 = &h * h.transpose();
    if spectral_summary(&m2).unwrap().numeric_rank != k {
        return Err(format!("draw has rank(M2) != {k}"));
    }
    let s1 = sigma(&m1);
    let s12 = sigma(&(&m1 + &m2));
    for i in 0..n {
        le(s1[i], s12[i], &format!("sigma_{} lower", i + 1))?;
    }
    for i in 0..n - k {
        le(s12[i + k], s1[i], &format!("sigma_{} upper", i + k + 1))?;
    }
    Ok(())
}

/// Symmetric positive definite `M` split into 2×2 blocks:
/// `σ₀(M) ≤ σ₀(M/M₂₂) ≤ σ₁(M/M₂₂) ≤ σ₁(M)`.
pub fn schur_complement(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let total = dim(&mut r);
    let first = r.random_range(1..total);
    let g = dense(&mut r, total, total);
    let m = &g * g.transpose() + Matrix::identity(total, total) * 0.1;
    let rest = total - first;
    let m11 = m.view((0, 0), (first, first));
    let m12 = m.view((0, first), (first, rest));
    let m21 = m.view((first, 0), (rest, first));
    let m22 = m.view((first, first), (rest, rest)).into_owned();
    let m22_inv = m22.try_inverse().ok_or("M22 singular")?;
    let schur = m11 - m12 * m22_inv * m21;
    let (lo, hi) = extremes(&m);
    let (s_lo, s_hi) = extremes(&schur);
    le(lo, s_lo, "sigma_0(M) <= sigma_0(S)")?;
    le(s_lo, s_hi, "sigma_0(S) <= sigma_1(S)")?;
    le(s_hi, hi, "sigma_1(S) <= sigma_1(M)")
}

/// `σ₁(M₁M₂) ≤ σ₁(M₁)σ₁(M₂)` for rectangular factors.
pub fn product_upper(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (rows, inner, cols) = (dim(&mut r), dim(&mut r), dim(&mut r));
    let m1 = dense(&mut r, rows, inner);
    let m2 = dense(&mut r, inner, cols);
    le(sigma(&(&m1 * &m2))[0], sigma(&m1)[0] * sigma(&m2)[0], "sigma_1 of product")
}

/// `σ₀(M₁M₂) ≥ σ₀(M₁)·min(M₂)` for a positive diagonal `M₂`; `M₁` may be rank
/// deficient.
pub fn product_lower(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (rows, cols) = (dim(&mut r), dim(&mut r));
    let rank = r.random_range(1..=rows.min(cols));
    let m1 = dense(&mut r, rows, rank) * dense(&mut r, rank, cols);
    let diag: Vec<f64> = (0..cols).map(|_| r.random_range(0.1..10.0)).collect();
    let m2 = Matrix::from_diagonal(&pqipm::linalg::Vector::from_vec(diag.clone()));
    let d_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let (s0, _) = extremes(&m1);
    let (p0, _) = extremes(&(&m1 * &m2));
    le(s0 * d_min, p0, "sigma_0(M1) min(M2) <= sigma_0(M1 M2)")
}

/// Padding a positive definite block with zero rows and columns keeps `σ₀`
/// and `σ₁`.
pub fn zero_padding(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = dim(&mut r);
    let pad = r.random_range(1..=MAX_DIM);
    let g = dense(&mut r, n, n);
    let m1 = &g * g.transpose() + Matrix::identity(n, n) * 0.1;
    let mut m2 = Matrix::zeros(n + pad, n + pad);
    m2.view_mut((0, 0), (n, n)).copy_from(&m1);
    let (a0, a1) = extremes(&m1);
    let (b0, b1) = extremes(&m2);
    eq(a0, b0, "sigma_0")?;
    eq(a1, b1, "sigma_1")
}

/// `σ(PMQ) = σ(M)` for permutation matrices `P`, `Q`.
pub fn permutation_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (rows, cols) = (dim(&mut r), dim(&mut r));
    let m = dense(&mut r, rows, cols);
    let permutation = |r: &mut ChaCha8Rng, k: usize| {
        let mut idx: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            idx.swap(i, r.random_range(0..=i));
        }
        Matrix::from_fn(k, k, |i, j| if idx[i] == j { 1.0 } else { 0.0 })
    };
    let p = permutation(&mut r, rows);
    let q = permutation(&mut r, cols);
    let a = sigma(&m);
    let b = sigma(&(p * &m * q));
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        eq(*x, *y, &format!("sigma_{}", i + 1))?;
    }
    Ok(())
}
