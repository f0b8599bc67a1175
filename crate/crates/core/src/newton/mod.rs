//! Newton systems of one interior point iteration.
//!
//! Given an iterate `(x, y, s)` the search direction solves
//!
//! ```text
//! A Δx          = r_p
//!   AᵀΔy + Δs   = r_d
//! S Δx + X Δs   = r_c,    r_c = β₁μe − XSe
//! ```
//!
//! This module builds the normal equations (NES), their basis-rescaled form
//! (MNES), the optimal-partition split of `D = X⁻¹S`, and the normalized
//! preconditioned reduced augmented system `ΞΔy = ξ` (RP-RAS). The spectral
//! certificate compares each system against its proven bounds.

mod certificate;
mod mnes;
mod rpras;

pub use certificate::{spectral_certificate, Margin, SpectralCertificate};
pub use mnes::{build_mnes, MnesSystem};
pub use rpras::{build_rpras, RpRasSystem};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::problem::Iterate;

/// Index split of the variables by predicted optimal partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Indices with `x_i ≥ threshold` (predicted basic).
    pub idx1: Vec<usize>,
    pub idx2: Vec<usize>,
    pub threshold: f64,
}

/// `i ∈ idx1` iff `x_i ≥ √([(1−γ₁)n + γ₁]μ)`.
pub fn partition(x: &Vector, mu: f64, gamma1: f64) -> Partition {
    let n = x.len() as f64;
    let threshold = (((1.0 - gamma1) * n + gamma1) * mu).sqrt();
    let (idx1, idx2): (Vec<usize>, Vec<usize>) = (0..x.len()).partition(|&i| x[i] >= threshold);
    Partition {
        idx1,
        idx2,
        threshold,
    }
}

/// `D = X⁻¹S` restricted to the two index sets, with `F₁ = I + D₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedScaling {
    pub idx1: Vec<usize>,
    pub idx2: Vec<usize>,
    pub d1: Vector,
    pub d2: Vector,
    pub f1: Vector,
    pub threshold: f64,
    pub d_full: Vector,
}

impl PartitionedScaling {
    pub fn size1(&self) -> usize {
        self.idx1.len()
    }
}

/// Builds the partitioned diagonal scaling for `it`.
pub fn build_scaling(it: &Iterate, part: &Partition) -> Result<PartitionedScaling> {
    if !it.is_interior() {
        return Err(Error::Domain("scaling needs x > 0 and s > 0".into()));
    }
    let n = it.x.len();
    let mut seen = vec![false; n];
    for &i in part.idx1.iter().chain(part.idx2.iter()) {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain(format!("index {i} is repeated or out of range")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Domain("partition does not cover all indices".into()));
    }

    let d_full = it.s.component_div(&it.x);
    let pick = |idx: &[usize]| Vector::from_iterator(idx.len(), idx.iter().map(|&i| d_full[i]));
    let d1 = pick(&part.idx1);
    let d2 = pick(&part.idx2);
    let f1 = d1.add_scalar(1.0);
    Ok(PartitionedScaling {
        idx1: part.idx1.clone(),
        idx2: part.idx2.clone(),
        d1,
        d2,
        f1,
        threshold: part.threshold,
        d_full,
    })
}
