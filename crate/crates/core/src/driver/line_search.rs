use crate::error::{Error, Result};
use crate::problem::{Iterate, IterateStats, LoProblem, Neighborhood};

use super::StepDirection;

pub const GRID_POINTS: usize = 64;
pub const BISECTION_TOL: f64 = 1e-8;
pub const MIN_STEP: f64 = 1e-12;
const FRACTION_TO_BOUNDARY: f64 = 0.9999;

/// Whether the step `α` keeps the point in the neighborhood and reduces the
/// gap: `(x+αΔx)ᵀ(s+αΔs) ≤ (1 − α(1−β₂))xᵀs`.
pub fn step_is_admissible(
    p: &LoProblem,
    it: &Iterate,
    dir: &StepDirection,
    alpha: f64,
    nbhd: &Neighborhood,
    beta2: f64,
) -> bool {
    let next = it.step(alpha, &dir.dx, &dir.dy, &dir.ds);
    let Ok(stats) = IterateStats::compute(p, &next) else {
        return false;
    };
    let gap = it.x.dot(&it.s);
    next.x.dot(&next.s) <= (1.0 - alpha * (1.0 - beta2)) * gap && nbhd.contains_with(&next, &stats)
}

/// Largest step in `(0, 1]` keeping `x + αΔx > 0` and `s + αΔs > 0`,
/// shortened by the fraction-to-boundary factor.
pub fn max_positive_step(it: &Iterate, dir: &StepDirection) -> f64 {
    let ratio = |v: &crate::linalg::Vector, dv: &crate::linalg::Vector| {
        v.iter()
            .zip(dv.iter())
            .filter(|(_, &d)| d < 0.0)
            .map(|(&x, &d)| -x / d)
            .fold(f64::INFINITY, f64::min)
    };
    let bound = ratio(&it.x, &dir.dx).min(ratio(&it.s, &dir.ds));
    if bound.is_finite() {
        (FRACTION_TO_BOUNDARY * bound).min(1.0)
    } else {
        1.0
    }
}

/// Step length `α̂` such that every checked `α ∈ (0, α̂]` is admissible.
///
/// The interval `(0, α_max]` is sampled on a uniform grid, the first failing
/// cell is bisected down to `1e−8`, and the result is re-checked on a fresh
/// grid of `(0, α̂]` (shrinking again if a point fails).
pub fn line_search(
    p: &LoProblem,
    it: &Iterate,
    dir: &StepDirection,
    nbhd: &Neighborhood,
    beta2: f64,
) -> Result<f64> {
    let ok = |alpha: f64| step_is_admissible(p, it, dir, alpha, nbhd, beta2);
    let alpha_max = max_positive_step(it, dir);

    let grid = |top: f64| (1..=GRID_POINTS).map(move |k| top * k as f64 / GRID_POINTS as f64);
    let first_failure = |top: f64| grid(top).position(|a| !ok(a));

    let mut alpha = match first_failure(alpha_max) {
        None => alpha_max,
        Some(k) => {
            let mut lo = alpha_max * k as f64 / GRID_POINTS as f64;
            let mut hi = alpha_max * (k + 1) as f64 / GRID_POINTS as f64;
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };

    while alpha >= MIN_STEP {
        match first_failure(alpha) {
            None => return Ok(alpha),
            Some(k) => alpha = alpha * k as f64 / GRID_POINTS as f64,
        }
    }
    Err(Error::Stall { alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, Vector};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    fn tiny() -> (LoProblem, Iterate) {
        let p = LoProblem::new(Matrix::from_row_slice(1, 2, &[1.0, 1.0]), v(&[2.0]), v(&[1.0, 1.0])).unwrap();
        let it = Iterate::new(v(&[1.0, 1.0]), v(&[0.0]), v(&[1.0, 1.0]));
        (p, it)
    }

    fn dir(dx: Vector, dy: Vector, ds: Vector) -> StepDirection {
        let n = dx.len();
        let m = dy.len();
        StepDirection {
            dx,
            dy,
            ds,
            nu: Vector::zeros(n),
            r: Vector::zeros(m),
            s_nu_inf: 0.0,
        }
    }

    #[test]
    fn zero_direction_stalls() {
        let (p, it) = tiny();
        let d = dir(Vector::zeros(2), Vector::zeros(1), Vector::zeros(2));
        let nb = Neighborhood::new(0.1, 1.0).unwrap();
        assert!(matches!(line_search(&p, &it, &d, &nb, 0.9), Err(Error::Stall { .. })));
    }

    #[test]
    fn positivity_caps_the_step() {
        let (p, it) = tiny();
        // x₁ hits zero at α = 0.3; the direction is feasible (AΔx = 0)
        let d = dir(v(&[-1.0 / 0.3, 1.0 / 0.3]), v(&[0.0]), v(&[-0.5, -0.5]));
        assert!((max_positive_step(&it, &d) - 0.9999 * 0.3).abs() < 1e-15);
        let nb = Neighborhood::new(1e-6, 1.0).unwrap();
        let alpha = line_search(&p, &it, &d, &nb, 0.9).unwrap();
        assert!(alpha <= 0.3);
    }

    #[test]
    fn centered_newton_step_is_long() {
        // x = s = e on min x₁ + x₂, x₁ + x₂ = 2: the pure centering target
        // β₁μe with β₁ = 0.5 gives Δx = 0, Δs = −0.5e, Δy = 0.5
        let (p, it) = tiny();
        let d = dir(Vector::zeros(2), v(&[0.5]), v(&[-0.5, -0.5]));
        let nb = Neighborhood::new(0.1, 1.0).unwrap();
        let alpha = line_search(&p, &it, &d, &nb, 0.9).unwrap();
        assert!(alpha >= 0.5);
        for k in 0..=64 {
            assert!(step_is_admissible(&p, &it, &d, alpha * k as f64 / 64.0, &nb, 0.9) || k == 0);
        }
    }
}
