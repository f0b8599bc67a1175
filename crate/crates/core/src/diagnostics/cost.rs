use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::problem::BasisNormalizedProblem;

/// Label attached to every estimate: the hidden constants are set to one,
/// so only ratios between estimates carry meaning.
pub const COST_UNITS: &str = "relative units";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostInputs {
    pub n: f64,
    /// Largest `‖(x, s)‖∞` over all iterates.
    pub omega_bar: f64,
    pub epsilon: f64,
    pub kappa_a: f64,
    /// `‖A‖_F`.
    pub frob_a: f64,
    /// `‖Â‖₂`.
    pub a_hat_norm: f64,
    /// `‖b̂‖₂`.
    pub b_hat_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    /// `n^1.5·ω̄¹³/ε⁶ · κ_A⁵·‖A‖_F⁶·(‖Â‖₂ + ‖b̂‖₂)`.
    pub per_iter_queries: f64,
    /// `n² · per_iter_queries`.
    pub total_queries: f64,
    pub inputs: CostInputs,
    pub units: String,
}

/// Closed-form QRAM query counts of the preconditioned method.
pub fn estimate_query_cost(inputs: CostInputs) -> Result<CostEstimate> {
    let CostInputs {
        n,
        omega_bar,
        epsilon,
        kappa_a,
        frob_a,
        a_hat_norm,
        b_hat_norm,
    } = inputs;
    let named = [
        ("n", n),
        ("omega_bar", omega_bar),
        ("epsilon", epsilon),
        ("kappa_a", kappa_a),
        ("frob_a", frob_a),
        ("a_hat_norm", a_hat_norm),
        ("b_hat_norm", b_hat_norm),
    ];
    if let Some((name, v)) = named.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")));
    }
    if epsilon > 1.0 {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be at most 1")));
    }
    let per_iter = n.powf(1.5) * omega_bar.powi(13) / epsilon.powi(6)
        * kappa_a.powi(5)
        * frob_a.powi(6)
        * (a_hat_norm + b_hat_norm);
    Ok(CostEstimate {
        per_iter_queries: per_iter,
        total_queries: n * n * per_iter,
        inputs,
        units: COST_UNITS.to_owned(),
    })
}

impl CostInputs {
    /// Inputs for a solved instance: `ω̄` is the largest `‖(x, s)‖∞` the
    /// run visited and `ε` its target precision.
    pub fn for_problem(np: &BasisNormalizedProblem, omega_bar: f64, epsilon: f64) -> Result<Self> {
        let a_hat_norm = singular_values(np.a_hat())?.first().copied().unwrap_or(0.0);
        Ok(Self {
            n: np.n() as f64,
            omega_bar,
            epsilon,
            kappa_a: np.kappa_a(),
            frob_a: np.problem().a().norm(),
            a_hat_norm,
            b_hat_norm: np.b_hat().norm(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> CostInputs {
        CostInputs {
            n: 1.0,
            omega_bar: 1.0,
            epsilon: 1.0,
            kappa_a: 1.0,
            frob_a: 1.0,
            a_hat_norm: 0.5,
            b_hat_norm: 0.5,
        }
    }

    #[test]
    fn unit_inputs() {
        let e = estimate_query_cost(unit()).unwrap();
        assert_eq!(e.per_iter_queries, 1.0);
        assert_eq!(e.total_queries, 1.0);
        assert_eq!(e.units, "relative units");
    }

    #[test]
    fn exponent_examples() {
        let base = estimate_query_cost(unit()).unwrap().per_iter_queries;
        let half_eps = estimate_query_cost(CostInputs { epsilon: 0.5, ..unit() }).unwrap();
        assert_eq!(half_eps.per_iter_queries / base, 64.0);
        let double_kappa = estimate_query_cost(CostInputs { kappa_a: 2.0, ..unit() }).unwrap();
        assert_eq!(double_kappa.per_iter_queries / base, 32.0);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(estimate_query_cost(CostInputs { n: 0.0, ..unit() }).is_err());
        assert!(estimate_query_cost(CostInputs { epsilon: 1.5, ..unit() }).is_err());
        assert!(estimate_query_cost(CostInputs { frob_a: f64::NAN, ..unit() }).is_err());
    }

    fn ratio(a: &CostEstimate, b: &CostEstimate) -> (f64, f64) {
        (a.per_iter_queries / b.per_iter_queries, a.total_queries / b.total_queries)
    }

    proptest! {
        #[test]
        fn multiplicative_in_each_input(
            n in 1.0f64..50.0,
            omega_bar in 0.5f64..3.0,
            epsilon in 0.05f64..0.5,
            kappa_a in 1.0f64..10.0,
            frob_a in 0.5f64..5.0,
            a_hat in 0.1f64..5.0,
            b_hat in 0.1f64..5.0,
            t in 0.5f64..2.0,
        ) {
            let base = CostInputs { n, omega_bar, epsilon, kappa_a, frob_a, a_hat_norm: a_hat, b_hat_norm: b_hat };
            let e0 = estimate_query_cost(base).unwrap();
            let close = |got: f64, want: f64| (got - want).abs() <= 1e-9 * want;

            let (p, q) = ratio(&estimate_query_cost(CostInputs { n: n * t, ..base }).unwrap(), &e0);
            prop_assert!(close(p, t.powf(1.5)) && close(q, t.powf(3.5)));
            let (p, _) = ratio(&estimate_query_cost(CostInputs { omega_bar: omega_bar * t, ..base }).unwrap(), &e0);
            prop_assert!(close(p, t.powi(13)));
            let (p, _) = ratio(&estimate_query_cost(CostInputs { epsilon: epsilon * t, ..base }).unwrap(), &e0);
            prop_assert!(close(p, t.powi(-6)));
            let (p, _) = ratio(&estimate_query_cost(CostInputs { kappa_a: kappa_a * t, ..base }).unwrap(), &e0);
            prop_assert!(close(p, t.powi(5)));
            let (p, _) = ratio(&estimate_query_cost(CostInputs { frob_a: frob_a * t, ..base }).unwrap(), &e0);
            prop_assert!(close(p, t.powi(6)));
            let scaled_norms = CostInputs { a_hat_norm: a_hat * t, b_hat_norm: b_hat * t, ..base };
            let (p, _) = ratio(&estimate_query_cost(scaled_norms).unwrap(), &e0);
            prop_assert!(close(p, t));
        }

        #[test]
        fn increasing_in_inverse_epsilon(epsilon in 0.01f64..1.0, shrink in 0.1f64..0.99) {
            let a = estimate_query_cost(CostInputs { epsilon, ..unit() }).unwrap();
            let b = estimate_query_cost(CostInputs { epsilon: epsilon * shrink, ..unit() }).unwrap();
            prop_assert!(b.per_iter_queries > a.per_iter_queries);
        }
    }
}
