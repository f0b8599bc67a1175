//! Standard-form linear optimization problems, iterates and the central-path
//! neighborhood.
//!
//! The primal problem is `min cᵀx s.t. Ax = b, x ≥ 0` with `A` of full row
//! rank; the dual is `max bᵀy s.t. Aᵀy + s = c, s ≥ 0`.

mod basis;
mod generate;
mod io;

pub use basis::{basis_normalize, BasisNormalizedProblem};
pub use generate::{generate_degenerate_lo, generate_random_lo, GeneratedInstance};
pub use io::{load_problem, parse_problem, save_problem, write_problem};

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, spectral_summary, Matrix, Vector};

/// A linear optimization instance `(A, b, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoProblem {
    a: Matrix,
    b: Vector,
    c: Vector,
}

impl LoProblem {
    /// Validates shapes, finiteness, `m ≤ n` and full row rank.
    pub fn new(a: Matrix, b: Vector, c: Vector) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::Validation("A must have at least one row and column".into()));
        }
        if m > n {
            return Err(Error::Validation(format!("A is {m}x{n}; need m <= n")));
        }
        if b.len() != m {
            return Err(Error::Validation(format!("b has length {}, expected {m}", b.len())));
        }
        if c.len() != n {
            return Err(Error::Validation(format!("c has length {}, expected {n}", c.len())));
        }
        if !(a.iter().chain(b.iter()).chain(c.iter()).all(|v| v.is_finite())) {
            return Err(Error::Validation("data contains non-finite values".into()));
        }
        let rank = match spectral_summary(&a) {
            Ok(s) => s.numeric_rank,
            Err(Error::Degenerate(_)) => 0,
            Err(e) => return Err(e),
        };
        if rank != m {
            return Err(Error::RankDeficient { rank, expected: m });
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn c(&self) -> &Vector {
        &self.c
    }

    /// Number of equality constraints.
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// True if every entry of `A`, `b` and `c` is an integer.
    pub fn is_integral(&self) -> bool {
        self.a
            .iter()
            .chain(self.b.iter())
            .chain(self.c.iter())
            .all(|v| v.fract() == 0.0)
    }

    fn check_iterate(&self, it: &Iterate) -> Result<()> {
        if it.x.len() != self.n() || it.s.len() != self.n() || it.y.len() != self.m() {
            return Err(Error::Shape(format!(
                "iterate has (x, y, s) lengths ({}, {}, {}), problem is {}x{}",
                it.x.len(),
                it.y.len(),
                it.s.len(),
                self.m(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// A primal-dual point `(x, y, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub x: Vector,
    pub y: Vector,
    pub s: Vector,
}

impl Iterate {
    pub fn new(x: Vector, y: Vector, s: Vector) -> Self {
        Self { x, y, s }
    }

    /// Duality measure `xᵀs / n`.
    pub fn mu(&self) -> f64 {
        mu_of(self)
    }

    /// `‖(x, 0·y, s)‖∞`.
    pub fn omega(&self) -> f64 {
        inf_norm(&self.x).max(inf_norm(&self.s))
    }

    pub fn is_interior(&self) -> bool {
        self.x.iter().chain(self.s.iter()).all(|&v| v > 0.0)
    }

    /// Point `self + alpha·(dx, dy, ds)`.
    pub fn step(&self, alpha: f64, dx: &Vector, dy: &Vector, ds: &Vector) -> Iterate {
        Iterate {
            x: &self.x + dx * alpha,
            y: &self.y + dy * alpha,
            s: &self.s + ds * alpha,
        }
    }
}

/// Quantities derived from an iterate for a given problem.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateStats {
    pub mu: f64,
    pub omega: f64,
    pub rp: Vector,
    pub rd: Vector,
    /// `‖(r_p, r_d)‖₂`.
    pub infeas_norm: f64,
}

impl IterateStats {
    pub fn compute(p: &LoProblem, it: &Iterate) -> Result<Self> {
        let (rp, rd) = residuals(p, it)?;
        let infeas_norm = (rp.norm_squared() + rd.norm_squared()).sqrt();
        Ok(Self {
            mu: mu_of(it),
            omega: it.omega(),
            rp,
            rd,
            infeas_norm,
        })
    }
}

/// Primal and dual residuals `r_p = b − Ax`, `r_d = c − Aᵀy − s`.
pub fn residuals(p: &LoProblem, it: &Iterate) -> Result<(Vector, Vector)> {
    p.check_iterate(it)?;
    let rp = &p.b - &p.a * &it.x;
    let rd = &p.c - p.a.tr_mul(&it.y) - &it.s;
    Ok((rp, rd))
}

/// `μ = xᵀs / n`.
pub fn mu_of(it: &Iterate) -> f64 {
    it.x.dot(&it.s) / it.x.len() as f64
}

/// The central-path neighborhood `𝒩(γ₁, γ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhood {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Neighborhood {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma1 < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma1 = {gamma1} not in (0, 1)")));
        }
        if !(gamma2 >= 1.0) {
            return Err(Error::InvalidParameter(format!("gamma2 = {gamma2} must be >= 1")));
        }
        Ok(Self { gamma1, gamma2 })
    }

    /// Membership test; both inequalities are inclusive.
    pub fn contains(&self, p: &LoProblem, it: &Iterate) -> Result<bool> {
        let stats = IterateStats::compute(p, it)?;
        Ok(self.contains_with(it, &stats))
    }

    pub(crate) fn contains_with(&self, it: &Iterate, stats: &IterateStats) -> bool {
        let nonneg = it.x.iter().chain(it.s.iter()).all(|&v| v >= 0.0);
        let floor = self.gamma1 * stats.mu;
        let centered = it.x.iter().zip(it.s.iter()).all(|(x, s)| x * s >= floor);
        nonneg && centered && stats.infeas_norm <= self.gamma2 * stats.mu
    }
}

/// Membership in `𝒩(γ₁, γ₂)`.
pub fn in_neighborhood(p: &LoProblem, it: &Iterate, nbhd: &Neighborhood) -> Result<bool> {
    nbhd.contains(p, it)
}

/// True iff `xᵀs ≤ nε` and `‖(r_p, r_d)‖₂ ≤ ε`.
pub fn is_eps_approximate(p: &LoProblem, it: &Iterate, epsilon: f64) -> Result<bool> {
    let stats = IterateStats::compute(p, it)?;
    Ok(eps_approximate_with(it, &stats, epsilon))
}

pub(crate) fn eps_approximate_with(it: &Iterate, stats: &IterateStats, epsilon: f64) -> bool {
    it.x.dot(&it.s) <= it.x.len() as f64 * epsilon && stats.infeas_norm <= epsilon
}

/// Parameters of the interior point loop.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoParams {
    /// Target precision `ε`.
    pub epsilon: f64,
    pub gamma1: f64,
    /// Fixed `γ₂`; when `None` it is computed from the starting point.
    pub gamma2_override: Option<f64>,
    /// Centering factor used in `r_c = β₁μe − XSe`.
    pub beta1: f64,
    /// Required gap reduction factor in the line search.
    pub beta2: f64,
    /// Inexactness tolerance of the linear solves.
    pub eta: f64,
    /// Bound `ω*` on the optimal set; `None` falls back to
    /// [`AlgoParams::fallback_omega_star`].
    pub omega_star: Option<f64>,
    /// Infeasibility is declared when `‖(x, s)‖∞ > factor·ω*`; `None` uses
    /// `8n`. Iterates of a feasible run routinely overshoot `ω*` itself.
    pub infeasibility_factor: Option<f64>,
    pub max_iters: usize,
    /// Compute a spectral certificate at every iteration.
    pub certify: bool,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            gamma1: 0.1,
            gamma2_override: None,
            beta1: 0.5,
            beta2: 0.9,
            eta: 0.1,
            omega_star: None,
            infeasibility_factor: None,
            max_iters: 1000,
            certify: true,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !(self.gamma1 > 0.0 && self.gamma1 < 1.0) {
            return bad(format!("gamma1 = {} not in (0, 1)", self.gamma1));
        }
        if let Some(g2) = self.gamma2_override {
            if !(g2 >= 1.0) {
                return bad(format!("gamma2 = {g2} must be >= 1"));
            }
        }
        if !(0.0 < self.eta && self.eta < self.beta1 && self.beta1 < self.beta2 && self.beta2 < 1.0)
        {
            return bad(format!(
                "need 0 < eta < beta1 < beta2 < 1, got eta = {}, beta1 = {}, beta2 = {}",
                self.eta, self.beta1, self.beta2
            ));
        }
        if let Some(f) = self.infeasibility_factor {
            if !(f >= 1.0) {
                return bad(format!("infeasibility_factor = {f} must be >= 1"));
            }
        }
        if let Some(w) = self.omega_star {
            if !(w > 0.0 && w.is_finite()) {
                return bad(format!("omega_star = {w} must be positive"));
            }
        }
        Ok(())
    }

    /// `10·max(‖b‖∞, ‖c‖∞, 1)`, used when no bound on the optimal set is known.
    pub fn fallback_omega_star(p: &LoProblem) -> f64 {
        10.0 * inf_norm(p.b()).max(inf_norm(p.c())).max(1.0)
    }

    pub fn resolve_infeasibility_factor(&self, n: usize) -> f64 {
        self.infeasibility_factor.unwrap_or(8.0 * n as f64)
    }

    pub fn resolve_omega_star(&self, p: &LoProblem) -> f64 {
        self.omega_star.unwrap_or_else(|| Self::fallback_omega_star(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    fn tiny() -> LoProblem {
        LoProblem::new(Matrix::from_row_slice(1, 2, &[1.0, 1.0]), v(&[2.0]), v(&[1.0, 1.0])).unwrap()
    }

    #[test]
    fn residual_examples() {
        let p = tiny();
        let it = Iterate::new(v(&[1.0, 1.0]), v(&[0.0]), v(&[1.0, 1.0]));
        let (rp, rd) = residuals(&p, &it).unwrap();
        assert_eq!(rp.as_slice(), &[0.0]);
        assert_eq!(rd.as_slice(), &[0.0, 0.0]);

        let it = Iterate::new(v(&[1.0, 0.5]), v(&[0.0]), v(&[1.0, 1.0]));
        let (rp, _) = residuals(&p, &it).unwrap();
        assert_eq!(rp.as_slice(), &[0.5]);
    }

    #[test]
    fn residual_shape_error() {
        let p = tiny();
        let it = Iterate::new(v(&[1.0]), v(&[0.0]), v(&[1.0, 1.0]));
        assert!(matches!(residuals(&p, &it), Err(Error::Shape(_))));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_of(&Iterate::new(v(&[1.0, 1.0]), v(&[]), v(&[1.0, 1.0]))), 1.0);
        assert_eq!(mu_of(&Iterate::new(v(&[2.0, 0.5]), v(&[]), v(&[0.5, 2.0]))), 1.0);
        assert_eq!(mu_of(&Iterate::new(v(&[3.0, 1.0]), v(&[]), v(&[1.0, 1.0]))), 2.0);
    }

    #[test]
    fn neighborhood_examples() {
        let p = tiny();
        let nb = Neighborhood::new(0.5, 1.0).unwrap();
        let centered = Iterate::new(v(&[1.0, 1.0]), v(&[0.0]), v(&[1.0, 1.0]));
        assert!(nb.contains(&p, &centered).unwrap());

        // x1 s1 = 0.25 = 0.5 γ₁ μ with γ₁ = 0.5, μ = 1
        let it = Iterate::new(v(&[1.0, 1.0]), v(&[0.0]), v(&[0.25, 1.75]));
        assert_eq!(it.mu(), 1.0);
        let nb_loose = Neighborhood::new(0.5, 1e6).unwrap();
        assert!(!nb_loose.contains(&p, &it).unwrap());
    }

    #[test]
    fn neighborhood_boundary_is_inclusive() {
        // μ = 1, x1 s1 = 0.5 exactly with γ₁ = 0.5
        let p = tiny();
        let it = Iterate::new(v(&[1.0, 1.0]), v(&[0.0]), v(&[0.5, 1.5]));
        assert_eq!(it.mu(), 1.0);
        let nb = Neighborhood::new(0.5, 10.0).unwrap();
        assert!(nb.contains(&p, &it).unwrap());
    }

    #[test]
    fn eps_approximate_examples() {
        let p = tiny();
        let opt = Iterate::new(v(&[2.0, 0.0]), v(&[1.0]), v(&[0.0, 0.0]));
        assert!(is_eps_approximate(&p, &opt, 1e-12).unwrap());

        // feasible, μ = 2ε
        let eps = 1e-3;
        let x = v(&[1.0, 1.0]);
        let s = v(&[2.0 * eps, 2.0 * eps]);
        let y = v(&[1.0 - 2.0 * eps]);
        let it = Iterate::new(x, y, s);
        assert!(!is_eps_approximate(&p, &it, eps).unwrap());

        // μ = ε/2 but infeasibility 2ε
        let it = Iterate::new(v(&[1.0, 1.0 - 2.0 * eps]), v(&[1.0 - eps / 2.0]), v(&[eps / 2.0, eps / 2.0]));
        let stats = IterateStats::compute(&p, &it).unwrap();
        assert!((stats.infeas_norm - 2.0 * eps).abs() < 1e-12);
        assert!(!is_eps_approximate(&p, &it, eps).unwrap());
    }

    #[test]
    fn problem_validation() {
        let a = Matrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert!(matches!(
            LoProblem::new(a, v(&[1.0, 1.0]), v(&[1.0])),
            Err(Error::Validation(_))
        ));
        let a = Matrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        assert!(matches!(
            LoProblem::new(a, v(&[1.0, 1.0]), v(&[1.0, 1.0, 1.0])),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn params_ordering() {
        let mut p = AlgoParams::default();
        p.validate().unwrap();
        p.eta = 0.6;
        assert!(p.validate().is_err());
    }
}
