use crate::linalg::{inf_norm, Matrix, Vector};
use crate::newton::MnesSystem;
use crate::problem::{Iterate, IterateStats};

/// An inexact Newton direction with its residual bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDirection {
    pub dx: Vector,
    pub dy: Vector,
    pub ds: Vector,
    /// `[D_B^{-1/2}r; 0]`.
    pub nu: Vector,
    /// MNES residual `r = M_MNES M_B⁻¹Δy − v_MNES`.
    pub r: Vector,
    /// `‖Sν‖∞`.
    pub s_nu_inf: f64,
}

/// Completes `Δy` to a full direction.
///
/// `Δs = r_d − AᵀΔy` and `Δx = S⁻¹(r_c − XΔs) − ν`. The correction `ν`
/// makes `AΔx = r_p` hold exactly, so all inexactness lands in the
/// complementarity row: `XΔs + SΔx − r_c = −Sν`.
pub fn direction_from_dy(
    a: &Matrix,
    dy: &Vector,
    mnes: &MnesSystem,
    it: &Iterate,
    stats: &IterateStats,
) -> StepDirection {
    let m = dy.len();
    let n = it.x.len();
    let r = mnes.residual(dy);
    let mut nu = Vector::zeros(n);
    for i in 0..m {
        nu[i] = r[i] / mnes.d_b[i].sqrt();
    }
    let ds = &stats.rd - a.tr_mul(dy);
    let dx = (&mnes.r_c - it.x.component_mul(&ds)).component_div(&it.s) - &nu;
    let s_nu_inf = inf_norm(&it.s.component_mul(&nu));
    StepDirection {
        dx,
        dy: dy.clone(),
        ds,
        nu,
        r,
        s_nu_inf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_spd;
    use crate::newton::build_mnes;
    use crate::problem::{basis_normalize, generate_random_lo};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(seed: u64) -> (crate::problem::BasisNormalizedProblem, Iterate, IterateStats, MnesSystem) {
        let g = generate_random_lo(4, 9, seed).unwrap();
        let np = basis_normalize(&g.problem).unwrap();
        let base = np.from_original(&g.interior);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let it = Iterate::new(
            base.x.map(|v| v * rng.random_range(0.5..2.0)),
            base.y.map(|v| v + rng.random_range(-0.5..0.5)),
            base.s.map(|v| v * rng.random_range(0.5..2.0)),
        );
        let stats = IterateStats::compute(np.problem(), &it).unwrap();
        let mnes = build_mnes(&np, &it, &stats, 0.5).unwrap();
        (np, it, stats, mnes)
    }

    #[test]
    fn exact_dy_gives_exact_newton_step() {
        let (np, it, stats, mnes) = setup(1);
        let dy = solve_spd(&mnes.m_nes, &mnes.nes_rhs).unwrap();
        let dir = direction_from_dy(np.problem().a(), &dy, &mnes, &it, &stats);
        assert!(dir.nu.amax() <= 1e-9);
        let third = it.x.component_mul(&dir.ds) + it.s.component_mul(&dir.dx) - &mnes.r_c;
        assert!(third.amax() <= 1e-9 * mnes.r_c.amax().max(1.0));
    }

    #[test]
    fn residual_identity_for_any_dy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..10 {
            let (np, it, stats, mnes) = setup(seed);
            let a = np.problem().a();
            let dy = Vector::from_fn(4, |_, _| rng.random_range(-3.0..3.0));
            let dir = direction_from_dy(a, &dy, &mnes, &it, &stats);

            let lhs = it.x.component_mul(&dir.ds) + it.s.component_mul(&dir.dx) - &mnes.r_c;
            let rhs = -it.s.component_mul(&dir.nu);
            let scale = lhs.amax().max(rhs.amax()).max(1.0);
            assert!((&lhs - &rhs).amax() <= 1e-9 * scale);

            let dual = a.tr_mul(&dir.dy) + &dir.ds - &stats.rd;
            assert!(dual.amax() <= 1e-12 * stats.rd.amax().max(1.0));

            // the primal row is satisfied exactly; ν lives in the basis block
            let primal = a * &dir.dx - &stats.rp;
            assert!(primal.norm() <= 1e-8 * (1.0 + stats.rp.norm()));
            assert!(dir.nu.rows(4, 5).iter().all(|&v| v == 0.0));
            assert_eq!(dir.s_nu_inf, inf_norm(&it.s.component_mul(&dir.nu)));
        }
    }
}
