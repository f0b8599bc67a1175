//! Linear-system oracles for the Newton step.
//!
//! A quantum linear system solver followed by tomography returns only a unit
//! vector `Δỹ` with `‖Δỹ − Δy*/‖Δy*‖‖₂ = ε_q`. The simulator reproduces that
//! contract exactly: it solves the system classically, normalizes, and
//! rotates the result by the chord length `ε_q` in a random direction. The
//! lost norm is recovered by the one-dimensional least-squares fit against
//! the MNES right-hand side, and `ε_q` is chosen so that the resulting MNES
//! residual satisfies `‖r‖₂ ≤ η√(μ/n)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, least_squares_scalar, solve_general, LuFactor, Matrix, SpdFactor, Vector};
use crate::newton::{MnesSystem, RpRasSystem};

/// How the Newton system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// Direct factorization.
    Exact,
    /// Exact solve, unit-vector readout with chord error `ε_q`, rescaling.
    SimulatedQuantum,
    /// Conjugate gradients to relative residual `iterative_tol_factor·ε_q/κ`,
    /// so the direction error is at most about `iterative_tol_factor·ε_q`.
    Iterative,
}

impl OracleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMode::Exact => "exact",
            OracleMode::SimulatedQuantum => "quantum",
            OracleMode::Iterative => "iterative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub mode: OracleMode,
    /// Must equal the driver's `η`.
    pub eta: f64,
    pub seed: u64,
    pub eps_q_cap: f64,
    pub iterative_tol_factor: f64,
}

impl OracleConfig {
    pub fn new(mode: OracleMode, eta: f64, seed: u64) -> Self {
        Self {
            mode,
            eta,
            seed,
            eps_q_cap: 1.0,
            iterative_tol_factor: 0.5,
        }
    }
}

/// Result of one oracle call.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    pub delta_y: Vector,
    /// The unit vector read out of the simulated tomography (or the
    /// normalized exact/iterative solution).
    pub unit_solution: Vector,
    pub eps_q_applied: f64,
    /// `r = M_MNES z − v_MNES` with `z = M_B⁻¹Δy`.
    pub mnes_residual: Vector,
    pub mnes_residual_norm: f64,
    /// `l*`, with `Δy = l*·unit_solution` (or `z = l*·unit_solution` for the
    /// baseline).
    pub rescale_factor: f64,
}

/// Which system the oracle is asked to solve.
#[derive(Debug, Clone, Copy)]
pub enum OracleTarget<'a> {
    /// `ΞΔy = ξ`, the preconditioned system.
    RpRas(&'a RpRasSystem),
    /// `M_MNES z = v_MNES` directly.
    Mnes,
}

/// `ε_q = η/(κ(M_MNES M_B⁻¹)‖v_MNES‖₂)·√(μ/n)`, capped at `cap`.
pub fn target_precision(mnes: &MnesSystem, mu: f64, n: usize, eta: f64, cap: f64) -> Result<f64> {
    let kappa = condition_number(&mnes.w)?;
    Ok(precision_formula(kappa, mnes.v_mnes.norm(), mu, n, eta, cap))
}

/// Same formula with `κ(M_MNES)` in place of `κ(M_MNES M_B⁻¹)`, for the
/// baseline that solves in `z` directly.
pub fn target_precision_mnes(mnes: &MnesSystem, mu: f64, n: usize, eta: f64, cap: f64) -> Result<f64> {
    let kappa = condition_number(&mnes.m_mnes)?;
    Ok(precision_formula(kappa, mnes.v_mnes.norm(), mu, n, eta, cap))
}

fn precision_formula(kappa: f64, v_norm: f64, mu: f64, n: usize, eta: f64, cap: f64) -> f64 {
    if v_norm == 0.0 {
        return cap;
    }
    (eta / (kappa * v_norm) * (mu / n as f64).sqrt()).min(cap)
}

/// Residual bound the oracle must meet: `η√(μ/n)`.
pub fn residual_target(mu: f64, n: usize, eta: f64) -> f64 {
    eta * (mu / n as f64).sqrt()
}

/// Exact solve of `ΞΔy = ξ` followed by the simulated tomography readout.
pub fn simulate_qlsa_qta(xi_mat: &Matrix, xi: &Vector, eps_q: f64, rng: &mut ChaCha8Rng) -> Result<Vector> {
    let exact = solve_general(xi_mat, xi)?;
    perturb_unit(&normalized(&exact)?, eps_q, rng)
}

fn normalized(v: &Vector) -> Result<Vector> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroSolution);
    }
    Ok(v / norm)
}

/// Rotates the unit vector `y_hat` by chord length `eps_q` towards a
/// uniformly random direction orthogonal to it.
///
/// In one dimension only `±y_hat` exist, so any `eps_q > 0` flips the sign.
pub fn perturb_unit(y_hat: &Vector, eps_q: f64, rng: &mut ChaCha8Rng) -> Result<Vector> {
    if !(0.0..2.0).contains(&eps_q) {
        return Err(Error::InvalidParameter(format!("eps_q = {eps_q} not in [0, 2)")));
    }
    if eps_q == 0.0 {
        return Ok(y_hat.clone());
    }
    let m = y_hat.len();
    if m == 1 {
        return Ok(-y_hat);
    }
    let mut u = loop {
        let mut g = Vector::from_fn(m, |_, _| StandardNormal.sample(rng));
        for _ in 0..2 {
            let proj = y_hat.dot(&g);
            g.axpy(-proj, y_hat, 1.0);
        }
        if g.norm() > 1e-8 {
            break g;
        }
    };
    u.normalize_mut();
    let theta = 2.0 * (eps_q / 2.0).asin();
    Ok(y_hat * theta.cos() + u * theta.sin())
}

/// Fits the norm of `unit_solution` by minimizing `‖l·w − v_MNES‖₂` with
/// `w = M_MNES M_B⁻¹ unit_solution`. Returns `(Δy, l*, r)`.
pub fn rescale_minimizing_residual(unit_solution: &Vector, mnes: &MnesSystem) -> Result<(Vector, f64, Vector)> {
    let w = &mnes.w * unit_solution;
    let (l_star, r) = rescale_against(&w, &mnes.v_mnes)?;
    Ok((unit_solution * l_star, l_star, r))
}

fn rescale_against(w: &Vector, v: &Vector) -> Result<(f64, Vector)> {
    let l_star = least_squares_scalar(w, v).map_err(|e| match e {
        Error::Degenerate(_) => Error::DegenerateDirection,
        other => other,
    })?;
    Ok((l_star, w * l_star - v))
}

/// A stateful oracle; owns its random stream.
#[derive(Debug, Clone)]
pub struct Oracle {
    cfg: OracleConfig,
    rng: ChaCha8Rng,
}

impl Oracle {
    pub fn new(cfg: OracleConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Self { cfg, rng }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }

    /// Solves with the precision from the formula.
    pub fn solve(
        &mut self,
        target: OracleTarget<'_>,
        mnes: &MnesSystem,
        mu: f64,
        n: usize,
    ) -> Result<OracleOutput> {
        self.solve_shrunk(target, mnes, mu, n, 1.0)
    }

    /// Solves with `ε_q` multiplied by `shrink` (the driver's retry policy).
    /// Fails with [`Error::PrecisionNotMet`] if `‖r‖₂ > η√(μ/n)`.
    pub fn solve_shrunk(
        &mut self,
        target: OracleTarget<'_>,
        mnes: &MnesSystem,
        mu: f64,
        n: usize,
        shrink: f64,
    ) -> Result<OracleOutput> {
        let eps_q = match self.cfg.mode {
            OracleMode::Exact => 0.0,
            _ => {
                let base = match target {
                    OracleTarget::RpRas(_) => target_precision(mnes, mu, n, self.cfg.eta, self.cfg.eps_q_cap)?,
                    OracleTarget::Mnes => target_precision_mnes(mnes, mu, n, self.cfg.eta, self.cfg.eps_q_cap)?,
                };
                base * shrink
            }
        };
        let out = self.solve_with_eps(target, mnes, eps_q)?;
        let bound = residual_target(mu, n, self.cfg.eta);
        if !(out.mnes_residual_norm <= bound) {
            return Err(Error::PrecisionNotMet {
                achieved: out.mnes_residual_norm,
                target: bound,
            });
        }
        Ok(out)
    }

    /// Solves with a caller-chosen `ε_q`, without the precision check.
    pub fn solve_with_eps(
        &mut self,
        target: OracleTarget<'_>,
        mnes: &MnesSystem,
        eps_q: f64,
    ) -> Result<OracleOutput> {
        match target {
            OracleTarget::RpRas(sys) => self.solve_rpras(sys, mnes, eps_q),
            OracleTarget::Mnes => self.solve_mnes(mnes, eps_q),
        }
    }

    fn solve_rpras(&mut self, sys: &RpRasSystem, mnes: &MnesSystem, eps_q: f64) -> Result<OracleOutput> {
        if sys.xi.iter().all(|&v| v == 0.0) {
            return Ok(zero_step(mnes, eps_q));
        }
        match self.cfg.mode {
            OracleMode::Exact => {
                let dy = sys.solve_exact()?;
                let r = mnes.residual(&dy);
                Ok(output_from_exact(dy, r, 0.0))
            }
            OracleMode::SimulatedQuantum => {
                let unit = simulate_qlsa_qta(&sys.xi_mat, &sys.xi, eps_q, &mut self.rng)?;
                let (dy, l_star, r) = rescale_minimizing_residual(&unit, mnes)?;
                Ok(OracleOutput {
                    delta_y: dy,
                    unit_solution: unit,
                    eps_q_applied: eps_q,
                    mnes_residual_norm: r.norm(),
                    mnes_residual: r,
                    rescale_factor: l_star,
                })
            }
            OracleMode::Iterative => {
                let kappa = condition_number(&sys.xi_mat)?;
                let tol = self.cfg.iterative_tol_factor * eps_q / kappa;
                let approx = cgnr(&sys.xi_mat, &sys.xi, tol, 20 * sys.xi.len().max(1))?;
                let unit = normalized(&approx)?;
                let (dy, l_star, r) = rescale_minimizing_residual(&unit, mnes)?;
                Ok(OracleOutput {
                    delta_y: dy,
                    unit_solution: unit,
                    eps_q_applied: eps_q,
                    mnes_residual_norm: r.norm(),
                    mnes_residual: r,
                    rescale_factor: l_star,
                })
            }
        }
    }

    fn solve_mnes(&mut self, mnes: &MnesSystem, eps_q: f64) -> Result<OracleOutput> {
        if mnes.v_mnes.iter().all(|&v| v == 0.0) {
            return Ok(zero_step(mnes, eps_q));
        }
        let z_star = match self.cfg.mode {
            OracleMode::Iterative => {
                let kappa = condition_number(&mnes.m_mnes)?;
                let tol = self.cfg.iterative_tol_factor * eps_q / kappa;
                conjugate_gradient(&mnes.m_mnes, &mnes.v_mnes, tol, 20 * mnes.v_mnes.len().max(1))?
            }
            _ => match SpdFactor::new(&mnes.m_mnes) {
                Ok(f) => f.solve(&mnes.v_mnes)?,
                Err(_) => LuFactor::new(&mnes.m_mnes)?.solve(&mnes.v_mnes)?,
            },
        };
        if self.cfg.mode == OracleMode::Exact {
            let r = &mnes.m_mnes * &z_star - &mnes.v_mnes;
            let dy = mnes.dy_from_z(&z_star);
            return Ok(output_from_exact(dy, r, 0.0));
        }
        let z_hat = normalized(&z_star)?;
        let unit = match self.cfg.mode {
            OracleMode::SimulatedQuantum => perturb_unit(&z_hat, eps_q, &mut self.rng)?,
            _ => z_hat,
        };
        let w = &mnes.m_mnes * &unit;
        let (l_star, r) = rescale_against(&w, &mnes.v_mnes)?;
        Ok(OracleOutput {
            delta_y: mnes.dy_from_z(&(&unit * l_star)),
            unit_solution: unit,
            eps_q_applied: eps_q,
            mnes_residual_norm: r.norm(),
            mnes_residual: r,
            rescale_factor: l_star,
        })
    }
}

/// A zero right-hand side has the exact answer `Δy = 0`; there is no state to prepare.
fn zero_step(mnes: &MnesSystem, eps_q: f64) -> OracleOutput {
    let dy = Vector::zeros(mnes.v_mnes.len());
    let r = mnes.residual(&dy);
    output_from_exact(dy, r, eps_q)
}

fn output_from_exact(dy: Vector, r: Vector, eps_q: f64) -> OracleOutput {
    let norm = dy.norm();
    let unit = if norm > 0.0 { &dy / norm } else { dy.clone() };
    OracleOutput {
        delta_y: dy,
        unit_solution: unit,
        eps_q_applied: eps_q,
        mnes_residual_norm: r.norm(),
        mnes_residual: r,
        rescale_factor: norm,
    }
}

/// Conjugate gradients for symmetric positive definite `a`, stopping at
/// `‖b − a u‖₂ ≤ tol‖b‖₂`.
pub fn conjugate_gradient(a: &Matrix, b: &Vector, tol: f64, max_iters: usize) -> Result<Vector> {
    let mut u = Vector::zeros(b.len());
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Err(Error::ZeroSolution);
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for _ in 0..max_iters {
        if rr.sqrt() <= tol * b_norm {
            break;
        }
        let ap = a * &p;
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rr / pap;
        u.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_next = r.dot(&r);
        p = &r + &p * (rr_next / rr);
        rr = rr_next;
    }
    Ok(u)
}

/// CG on the normal equations `aᵀa u = aᵀb` of a square nonsingular `a`,
/// stopping at `‖b − a u‖₂ ≤ tol‖b‖₂`.
pub fn cgnr(a: &Matrix, b: &Vector, tol: f64, max_iters: usize) -> Result<Vector> {
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Err(Error::ZeroSolution);
    }
    let mut u = Vector::zeros(a.ncols());
    let mut r = b.clone();
    let mut z = a.tr_mul(&r);
    let mut p = z.clone();
    let mut zz = z.dot(&z);
    for _ in 0..max_iters {
        if r.norm() <= tol * b_norm || zz == 0.0 {
            break;
        }
        let ap = a * &p;
        let alpha = zz / ap.dot(&ap);
        u.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        z = a.tr_mul(&r);
        let zz_next = z.dot(&z);
        p = &z + &p * (zz_next / zz);
        zz = zz_next;
    }
    Ok(u)
}
