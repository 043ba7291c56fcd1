use serde::{Deserialize, Serialize};

use crate::dimension::relative::block_pair;
use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::symbolic::{CylinderMeasure, Digit};

/// Ratios H_{k,N}(μ,μ)/H_{k,N}(ν,μ) over a (k, N) grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyGrid<T> {
    pub ks: Vec<usize>,
    pub caps: Vec<Digit>,
    /// ratios[i][j] at (ks[i], caps[j]).
    pub ratios: Vec<Vec<T>>,
    /// μ-mass missed at each grid point.
    pub defects: Vec<Vec<T>>,
    /// Value at the largest (k, N).
    pub beta: T,
    /// Largest distance from `beta` to the neighbours (k_prev, N) and (k, N_prev).
    pub spread: T,
    /// Heuristic: spread at most `STABLE_SPREAD`.
    pub stable: bool,
    /// H_{k,N}(μ,μ) = 0 everywhere, so β̂ = 0 by convention.
    pub zero_entropy: bool,
}

pub const STABLE_SPREAD: f64 = 0.02;

pub fn entropy_dimension_grid<T, N, M>(nu: &N, mu: &M, ks: &[usize], caps: &[Digit]) -> Result<EntropyGrid<T>>
where
    T: Real,
    N: CylinderMeasure<T> + ?Sized,
    M: CylinderMeasure<T> + ?Sized,
{
    if ks.is_empty() || caps.is_empty() || ks.contains(&0) || caps.contains(&0) {
        return Err(invalid("grid needs positive depths and caps"));
    }
    let mut ks = ks.to_vec();
    let mut caps = caps.to_vec();
    ks.sort_unstable();
    ks.dedup();
    caps.sort_unstable();
    caps.dedup();
    let mut own = vec![vec![T::zero(); caps.len()]; ks.len()];
    let mut cross = own.clone();
    let mut defects = own.clone();
    for (i, &k) in ks.iter().enumerate() {
        for (j, &n) in caps.iter().enumerate() {
            let b = block_pair(nu, mu, k, n)?;
            own[i][j] = b.own;
            cross[i][j] = b.cross;
            defects[i][j] = T::one() - b.mass;
        }
    }
    let zero_entropy = own.iter().flatten().all(|&h| h <= T::zero());
    let mut ratios = vec![vec![T::zero(); caps.len()]; ks.len()];
    if !zero_entropy {
        for i in 0..ks.len() {
            for j in 0..caps.len() {
                ratios[i][j] = if cross[i][j] > T::zero() {
                    (own[i][j] / cross[i][j]).max(T::zero())
                } else {
                    T::zero()
                };
            }
        }
    }
    let (li, lj) = (ks.len() - 1, caps.len() - 1);
    let beta = ratios[li][lj];
    let mut spread = T::zero();
    if li > 0 {
        spread = spread.max((ratios[li - 1][lj] - beta).abs());
    }
    if lj > 0 {
        spread = spread.max((ratios[li][lj - 1] - beta).abs());
    }
    Ok(EntropyGrid {
        ks,
        caps,
        ratios,
        defects,
        beta,
        spread,
        stable: spread <= T::c(STABLE_SPREAD),
        zero_entropy,
    })
}

/// Relative slack tolerated in h_rel ≥ h_μ before the inputs are rejected;
/// within it the ratio is clamped to 1.
pub const CLOSED_SLACK: f64 = 1e-6;

/// β = h_μ / h(ν|μ), with β = 0 when h(ν|μ) = ∞ (pass `T::infinity()`).
pub fn entropy_dimension_closed<T: Real>(h_mu: T, h_rel: T) -> Result<T> {
    if !(h_mu >= T::zero()) || !h_mu.is_finite() {
        return Err(invalid(format!("h_μ = {h_mu} must be finite and nonnegative")));
    }
    if h_rel.is_nan() {
        return Err(invalid("h(ν|μ) is NaN"));
    }
    if h_mu == T::zero() || h_rel == T::infinity() {
        return Ok(T::zero());
    }
    let slack = T::c(CLOSED_SLACK) * h_mu.max(T::one());
    if h_rel < h_mu - slack {
        return Err(invalid(format!(
            "h(ν|μ) = {h_rel} is below h_μ = {h_mu}; inputs are inconsistent"
        )));
    }
    Ok((h_mu / h_rel).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Bernoulli, MarkovMeasure, PeriodicOrbitMeasure};

    #[test]
    fn closed_form_cases() {
        assert_eq!(entropy_dimension_closed(0.0f64, 0.7).unwrap(), 0.0);
        assert_eq!(entropy_dimension_closed(0.4f64, 0.4).unwrap(), 1.0);
        assert_eq!(entropy_dimension_closed(0.4f64, f64::INFINITY).unwrap(), 0.0);
        let b = entropy_dimension_closed(0.38645f64, std::f64::consts::LN_2).unwrap();
        assert!((b - 0.5575).abs() < 1e-3);
        assert!(entropy_dimension_closed(0.5f64, 0.4).is_err());
    }

    #[test]
    fn same_measure_gives_one() {
        let mu = Bernoulli::new(vec![0.2f64, 0.3, 0.5]).unwrap();
        let g = entropy_dimension_grid(&mu, &mu, &[2, 4], &[3, 5]).unwrap();
        assert!(g.ratios.iter().flatten().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(g.stable && (g.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_gives_zero() {
        let mu = PeriodicOrbitMeasure::new(vec![1]).unwrap();
        let nu = Bernoulli::new(vec![0.5f64, 0.5]).unwrap();
        let g = entropy_dimension_grid(&nu, &mu, &[3, 6], &[2]).unwrap();
        assert!(g.zero_entropy && g.beta == 0.0);
    }

    #[test]
    fn markov_against_fair_coin() {
        let mu = MarkovMeasure::<f64>::order_one(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let nu = Bernoulli::new(vec![0.5f64, 0.5]).unwrap();
        let g = entropy_dimension_grid(&nu, &mu, &[6, 12], &[2, 20]).unwrap();
        let closed = mu.entropy() / 2f64.ln();
        assert!((g.beta - closed).abs() / closed < 0.05, "{} vs {closed}", g.beta);
    }
}
