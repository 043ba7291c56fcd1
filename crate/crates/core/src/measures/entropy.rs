use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Real;
use crate::symbolic::{for_each_positive, CylinderMeasure, Digit};

/// Cylinder entropy with the mass not seen by the enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderEntropy<T> {
    pub value: T,
    pub defect: T,
}

/// Σ_{ω∈Σ_N^k} −μ([ω]) ln μ([ω]) and the defect 1 − Σ μ([ω]).
pub fn block_entropy<T: Real, M: CylinderMeasure<T> + ?Sized>(mu: &M, k: usize, cap: Digit) -> Result<CylinderEntropy<T>> {
    let mut h = T::zero();
    let mut total = T::zero();
    for_each_positive(mu, k, cap, |_, m| {
        h = h - m * m.ln();
        total = total + m;
    })?;
    Ok(CylinderEntropy {
        value: h,
        defect: T::one() - total,
    })
}

/// (1/k) Σ_{ω∈Σ_N^k} −μ([ω]) ln μ([ω]).
pub fn entropy_cylinder<T: Real, M: CylinderMeasure<T> + ?Sized>(mu: &M, k: usize, cap: Digit) -> Result<CylinderEntropy<T>> {
    let b = block_entropy(mu, k, cap)?;
    Ok(CylinderEntropy {
        value: b.value / T::from_usize_lossy(k.max(1)),
        defect: b.defect,
    })
}

/// H_k − H_{k−1}, the entropy of the k-th letter given the previous k − 1.
/// For an invariant measure this decreases to h_μ and is exact for order-(k−1) chains.
pub fn conditional_entropy<T: Real, M: CylinderMeasure<T> + ?Sized>(mu: &M, k: usize, cap: Digit) -> Result<CylinderEntropy<T>> {
    let hk = block_entropy(mu, k, cap)?;
    let hk1 = block_entropy(mu, k.saturating_sub(1), cap)?;
    Ok(CylinderEntropy {
        value: hk.value - hk1.value,
        defect: hk.defect,
    })
}

/// Closed-form entropy of a finite-state Markov measure.
pub fn entropy_markov<T: Real>(mu: &crate::measures::MarkovMeasure<T>) -> T {
    mu.entropy()
}
