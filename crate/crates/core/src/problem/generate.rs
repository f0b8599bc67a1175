//! Seeded instance generators.
//!
//! Both generators build `A = [I N]` with small integer entries, pick a
//! strictly complementary optimal solution `(x*, y*, s*)` with integer
//! entries, and set `b = Ax*`, `c = Aᵀy* + s*`. A strictly feasible point is
//! then obtained by a dyadic perturbation `t = 2⁻ᵏ` of the optimum, so its
//! residuals are exactly zero in floating point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, Matrix, Vector};

use super::{Iterate, LoProblem};

const DATA_RANGE: i32 = 10;
/// Degenerate instances use smaller data: the transient before `κ(Y)`
/// settles into its `1/μ` regime scales with `‖A‖²ω²`.
const DEGENERATE_BLOCK_RANGE: i32 = 2;
const DEGENERATE_VALUE_RANGE: i32 = 3;

/// A generated instance with a certified interior point and optimal solution.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub problem: LoProblem,
    /// Strictly feasible point with zero residuals.
    pub interior: Iterate,
    /// The optimal solution the instance was built around.
    pub optimal: Iterate,
    /// `‖(x*, s*)‖∞` of `optimal`.
    pub omega_star_hint: f64,
}

/// Random nondegenerate instance: the identity columns form the optimal
/// basis, `x*_B ∈ [1, 10]`, `s*_N ∈ [1, 10]`.
pub fn generate_random_lo(m: usize, n: usize, seed: u64) -> Result<GeneratedInstance> {
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= m < n, got m = {m}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = n - m;
    let block = Matrix::from_fn(m, k, |_, _| rng.random_range(-DATA_RANGE..=DATA_RANGE) as f64);
    let a = identity_then(&block);

    let mut x_opt = Vector::zeros(n);
    let mut s_opt = Vector::zeros(n);
    for i in 0..m {
        x_opt[i] = rng.random_range(1..=DATA_RANGE) as f64;
    }
    for j in m..n {
        s_opt[j] = rng.random_range(1..=DATA_RANGE) as f64;
    }
    let y_opt = Vector::from_fn(m, |_, _| rng.random_range(-DATA_RANGE..=DATA_RANGE) as f64);

    build(a, x_opt, y_opt, s_opt)
}

/// Primal-degenerate instance with duplicated columns.
///
/// The optimal support is a set of `k = ⌊m/2⌋` duplicates of identity columns,
/// so `rank(A_support) < m` and the dual optimal face is not a single point.
/// The identity columns themselves are nonbasic at the optimum, which is what
/// makes `D = X⁻¹S` split into clusters that stress the normal equations as
/// `μ → 0`.
pub fn generate_degenerate_lo(m: usize, n: usize, seed: u64) -> Result<GeneratedInstance> {
    if m == 0 || m + 1 >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m < n - 1, got m = {m}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = (m / 2).min(n - m - 1);
    let dups = support.max(1);
    let free = n - m - dups;

    let mut block = Matrix::zeros(m, dups + free);
    for i in 0..dups {
        block[(i, i)] = 1.0;
    }
    for i in 0..m {
        for j in dups..dups + free {
            block[(i, j)] = rng.random_range(-DEGENERATE_BLOCK_RANGE..=DEGENERATE_BLOCK_RANGE) as f64;
        }
        // Ne < 0 row-wise, so a strictly positive primal point exists.
        while block.row(i).sum() >= 0.0 {
            let j = rng.random_range(dups..dups + free);
            if block[(i, j)] > -(DEGENERATE_BLOCK_RANGE as f64) {
                block[(i, j)] -= 1.0;
            }
        }
    }
    let a = identity_then(&block);

    let mut x_opt = Vector::zeros(n);
    let mut s_opt = Vector::zeros(n);
    for i in 0..m {
        s_opt[i] = rng.random_range(1..=DEGENERATE_VALUE_RANGE) as f64;
    }
    for i in 0..dups {
        if i < support {
            x_opt[m + i] = rng.random_range(1..=DEGENERATE_VALUE_RANGE) as f64;
        } else {
            s_opt[m + i] = rng.random_range(1..=DEGENERATE_VALUE_RANGE) as f64;
        }
    }
    for j in m + dups..n {
        s_opt[j] = rng.random_range(1..=DEGENERATE_VALUE_RANGE) as f64;
    }
    let y_opt = Vector::from_fn(m, |_, _| {
        rng.random_range(-DEGENERATE_VALUE_RANGE..=DEGENERATE_VALUE_RANGE) as f64
    });

    build(a, x_opt, y_opt, s_opt)
}

fn identity_then(block: &Matrix) -> Matrix {
    let m = block.nrows();
    let mut a = Matrix::zeros(m, m + block.ncols());
    a.view_mut((0, 0), (m, m)).fill_with_identity();
    a.view_mut((0, m), (m, block.ncols())).copy_from(block);
    a
}

fn build(a: Matrix, x_opt: Vector, y_opt: Vector, s_opt: Vector) -> Result<GeneratedInstance> {
    let (m, n) = a.shape();
    let b = &a * &x_opt;
    let c = a.tr_mul(&y_opt) + &s_opt;

    // Interior point: x⁰ = x* + t·u with A u = 0 on the N block shifted into
    // the identity block, y⁰ = y* − t·e.
    let block = a.columns(m, n - m).into_owned();
    let row_sums = block.column_sum();
    let col_sums = block.row_sum();
    let scale = inf_norm(&row_sums)
        .max(col_sums.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
        .max(1.0);
    let mut t = 1.0_f64;
    while t * scale > 0.5 {
        t *= 0.5;
    }

    let mut x0 = x_opt.clone();
    for j in m..n {
        x0[j] += t;
    }
    let tail = block * x0.rows(m, n - m);
    for i in 0..m {
        x0[i] = b[i] - tail[i];
    }
    let y0 = y_opt.map(|v| v - t);
    let s0 = &c - a.tr_mul(&y0);

    if !x0.iter().chain(s0.iter()).all(|&v| v > 0.0) {
        return Err(Error::Domain("generated interior point is not strictly positive".into()));
    }

    let omega_star_hint = inf_norm(&x_opt).max(inf_norm(&s_opt));
    let problem = LoProblem::new(a, b, c)?;
    Ok(GeneratedInstance {
        problem,
        interior: Iterate::new(x0, y0, s0),
        optimal: Iterate::new(x_opt, y_opt, s_opt),
        omega_star_hint,
    })
}
