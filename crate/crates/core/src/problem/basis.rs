use crate::error::{Error, Result};
use crate::linalg::{select_columns, spectral_summary, LuFactor, Matrix, Vector};

use super::{Iterate, LoProblem};

const INDEPENDENCE_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-10;

/// A problem whose columns are permuted so that `A = [A_B A_N]` with `A_B`
/// nonsingular, together with `Â = A_B⁻¹A`, `b̂ = A_B⁻¹b` and the spectral
/// data of `A` that the preconditioner needs.
#[derive(Debug, Clone)]
pub struct BasisNormalizedProblem {
    problem: LoProblem,
    permutation: Vec<usize>,
    basis_factor: LuFactor,
    basis_inverse: Matrix,
    a_hat: Matrix,
    b_hat: Vector,
    sigma_max_a: f64,
    sigma_min_a: f64,
}

impl BasisNormalizedProblem {
    /// The column-permuted problem.
    pub fn problem(&self) -> &LoProblem {
        &self.problem
    }

    /// `permutation[k]` is the original index of permuted column `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn basis_factor(&self) -> &LuFactor {
        &self.basis_factor
    }

    /// `A_B⁻¹`.
    pub fn basis_inverse(&self) -> &Matrix {
        &self.basis_inverse
    }

    pub fn a_hat(&self) -> &Matrix {
        &self.a_hat
    }

    pub fn b_hat(&self) -> &Vector {
        &self.b_hat
    }

    pub fn sigma_max_a(&self) -> f64 {
        self.sigma_max_a
    }

    /// `σ₀(A)`, computed once.
    pub fn sigma_min_a(&self) -> f64 {
        self.sigma_min_a
    }

    pub fn kappa_a(&self) -> f64 {
        self.sigma_max_a / self.sigma_min_a
    }

    pub fn m(&self) -> usize {
        self.problem.m()
    }

    pub fn n(&self) -> usize {
        self.problem.n()
    }

    /// Maps an iterate in permuted column order back to the original order.
    pub fn to_original(&self, it: &Iterate) -> Iterate {
        let n = self.n();
        let mut x = Vector::zeros(n);
        let mut s = Vector::zeros(n);
        for (k, &orig) in self.permutation.iter().enumerate() {
            x[orig] = it.x[k];
            s[orig] = it.s[k];
        }
        Iterate::new(x, it.y.clone(), s)
    }

    /// Maps an iterate in original column order to permuted order.
    pub fn from_original(&self, it: &Iterate) -> Iterate {
        let x = Vector::from_iterator(self.n(), self.permutation.iter().map(|&j| it.x[j]));
        let s = Vector::from_iterator(self.n(), self.permutation.iter().map(|&j| it.s[j]));
        Iterate::new(x, it.y.clone(), s)
    }
}

/// Picks `m` independent columns of `A`, moves them to the front and forms
/// `Â = A_B⁻¹A`, `b̂ = A_B⁻¹b`.
///
/// Unit columns (a single nonzero entry, e.g. slacks) are taken first; the
/// remaining rows are covered greedily by the column with the largest
/// relative residual after projecting out the columns already chosen.
pub fn basis_normalize(p: &LoProblem) -> Result<BasisNormalizedProblem> {
    let (m, n) = (p.m(), p.n());
    let a = p.a();

    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut covered = vec![false; m];
    for j in 0..n {
        let col = a.column(j);
        let nonzeros: Vec<usize> = (0..m).filter(|&i| col[i] != 0.0).collect();
        if let [row] = nonzeros[..] {
            if !covered[row] {
                covered[row] = true;
                chosen.push(j);
            }
        }
    }

    // Orthonormal basis of the span of chosen columns.
    let mut q: Vec<Vector> = Vec::with_capacity(m);
    for &j in &chosen {
        let mut v = a.column(j).into_owned();
        orthogonalize(&mut v, &q);
        let norm = v.norm();
        q.push(v / norm);
    }
    while chosen.len() < m {
        let mut best: Option<(usize, f64, Vector)> = None;
        for j in (0..n).filter(|j| !chosen.contains(j)) {
            let col = a.column(j).into_owned();
            let scale = col.norm();
            if scale == 0.0 {
                continue;
            }
            let mut v = col;
            orthogonalize(&mut v, &q);
            let rel = v.norm() / scale;
            if best.as_ref().is_none_or(|(_, r, _)| rel > *r) {
                best = Some((j, rel, v));
            }
        }
        match best {
            Some((j, rel, v)) if rel > INDEPENDENCE_TOL => {
                let norm = v.norm();
                q.push(v / norm);
                chosen.push(j);
            }
            _ => {
                return Err(Error::RankDeficient {
                    rank: chosen.len(),
                    expected: m,
                })
            }
        }
    }
    chosen.sort_unstable();

    let mut permutation = chosen.clone();
    permutation.extend((0..n).filter(|j| !chosen.contains(j)));

    let a_perm = select_columns(a, &permutation);
    let c_perm = Vector::from_iterator(n, permutation.iter().map(|&j| p.c()[j]));
    let problem = LoProblem {
        a: a_perm,
        b: p.b().clone(),
        c: c_perm,
    };

    let a_b = problem.a.columns(0, m).into_owned();
    let basis_factor = LuFactor::new(&a_b)?;
    let basis_inverse = basis_factor.inverse()?;
    let a_hat = basis_factor.solve_matrix(&problem.a)?;
    let b_hat = basis_factor.solve(&problem.b)?;

    let lead = a_hat.columns(0, m);
    let deviation = (lead - Matrix::identity(m, m)).amax();
    if deviation > IDENTITY_TOL {
        return Err(Error::Singular);
    }

    let spectrum = spectral_summary(&problem.a)?;
    Ok(BasisNormalizedProblem {
        problem,
        permutation,
        basis_factor,
        basis_inverse,
        a_hat,
        b_hat,
        sigma_max_a: spectrum.sigma_max,
        sigma_min_a: spectrum.sigma_min_nonzero,
    })
}

fn orthogonalize(v: &mut Vector, q: &[Vector]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for u in q {
            let proj = u.dot(v);
            v.axpy(-proj, u, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    #[test]
    fn identity_leading_block_is_kept() {
        let a = Matrix::from_row_slice(2, 4, &[1.0, 0.0, 3.0, -1.0, 0.0, 1.0, 2.0, 5.0]);
        let p = LoProblem::new(a.clone(), v(&[1.0, 2.0]), v(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        let np = basis_normalize(&p).unwrap();
        assert_eq!(np.permutation(), &[0, 1, 2, 3]);
        assert_eq!(np.a_hat(), &a);
        assert_eq!(np.b_hat(), p.b());
    }

    #[test]
    fn trailing_identity_moves_to_front() {
        let n_block = [3.0, -1.0, 2.0, 5.0];
        let a = Matrix::from_row_slice(2, 4, &[3.0, -1.0, 1.0, 0.0, 2.0, 5.0, 0.0, 1.0]);
        let p = LoProblem::new(a, v(&[1.0, 2.0]), v(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        let np = basis_normalize(&p).unwrap();
        assert_eq!(np.permutation(), &[2, 3, 0, 1]);
        let expected =
            Matrix::from_row_slice(2, 4, &[1.0, 0.0, n_block[0], n_block[1], 0.0, 1.0, n_block[2], n_block[3]]);
        assert_eq!(np.a_hat(), &expected);
        assert_eq!(np.problem().c().as_slice(), &[3.0, 4.0, 1.0, 2.0]);
    }

    #[test]
    fn random_full_rank_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Matrix::from_fn(5, 9, |_, _| rng.random_range(-5..=5) as f64);
        let p = LoProblem::new(a, Vector::from_fn(5, |i, _| i as f64), Vector::from_element(9, 1.0)).unwrap();
        let np = basis_normalize(&p).unwrap();
        let a_b = np.problem().a().columns(0, 5).into_owned();
        let back = &a_b * np.a_hat();
        assert!((back - np.problem().a()).amax() <= 1e-10);
        let lead = np.a_hat().columns(0, 5).into_owned();
        assert!((lead - Matrix::identity(5, 5)).amax() <= 1e-10);
    }

    #[test]
    fn normalized_system_is_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Matrix::from_fn(4, 7, |_, _| rng.random_range(-3..=3) as f64);
        let x0 = Vector::from_fn(7, |_, _| rng.random_range(0.5..2.0));
        let b = &a * &x0;
        let p = LoProblem::new(a, b, Vector::from_element(7, 1.0)).unwrap();
        let np = basis_normalize(&p).unwrap();
        let it = np.from_original(&Iterate::new(x0.clone(), Vector::zeros(4), x0.clone()));
        let lhs = np.a_hat() * &it.x - np.b_hat();
        assert!(lhs.amax() < 1e-9);
        assert_eq!(np.to_original(&it).x, x0);
    }

    #[test]
    fn sigma_of_a_is_cached() {
        let a = Matrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let p = LoProblem::new(a, v(&[1.0, 1.0]), v(&[1.0, 1.0, 1.0])).unwrap();
        let np = basis_normalize(&p).unwrap();
        assert_eq!(np.sigma_max_a(), 2.0);
        assert_eq!(np.sigma_min_a(), 1.0);
        assert_eq!(np.kappa_a(), 2.0);
    }
}
