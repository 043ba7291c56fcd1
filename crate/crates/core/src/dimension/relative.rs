use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gibbs::{GibbsModel, Potential};
use crate::scalar::Real;
use crate::symbolic::word::format_digits;
use crate::symbolic::{for_each_positive, CylinderMeasure, Digit};

/// −(1/k) Σ_{ω∈Σ_N^k} μ([ω]) ln ν([ω]) with the μ-mass missed by the cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeEntropySum<T> {
    pub value: T,
    pub defect: T,
    pub k: usize,
    pub cap: Digit,
}

/// Block entropies H_{k,N}(μ,μ) and H_{k,N}(ν,μ) in one pass over Σ_N^k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct BlockPair<T> {
    pub own: T,
    pub cross: T,
    pub mass: T,
}

pub(crate) fn block_pair<T, N, M>(nu: &N, mu: &M, k: usize, cap: Digit) -> Result<BlockPair<T>>
where
    T: Real,
    N: CylinderMeasure<T> + ?Sized,
    M: CylinderMeasure<T> + ?Sized,
{
    let mut own = T::zero();
    let mut cross = T::zero();
    let mut mass = T::zero();
    let mut bad: Option<Vec<Digit>> = None;
    for_each_positive(mu, k, cap, |w, m| {
        if bad.is_some() {
            return;
        }
        let ln_nu = nu.log_mass(w);
        if !ln_nu.is_finite() {
            bad = Some(w.to_vec());
            return;
        }
        own = own - m * m.ln();
        cross = cross - m * ln_nu;
        mass = mass + m;
    })?;
    if let Some(w) = bad {
        return Err(Error::SupportMismatch(format!(
            "ν vanishes on [{}] where μ is positive",
            format_digits(&w)
        )));
    }
    Ok(BlockPair { own, cross, mass })
}

pub fn relative_entropy_sum<T, N, M>(nu: &N, mu: &M, k: usize, cap: Digit) -> Result<RelativeEntropySum<T>>
where
    T: Real,
    N: CylinderMeasure<T> + ?Sized,
    M: CylinderMeasure<T> + ?Sized,
{
    if k == 0 {
        return Err(invalid("depth k must be positive"));
    }
    let b = block_pair(nu, mu, k, cap)?;
    Ok(RelativeEntropySum {
        value: b.cross / T::from_usize_lossy(k),
        defect: T::one() - b.mass,
        k,
        cap,
    })
}

/// Settings for the integral form of h(ν|μ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralOptions {
    /// Partial sums I_k below this many nats count as diverging.
    pub threshold: f64,
    /// Cap halvings inspected for flattening.
    pub doublings: usize,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions { threshold: -1e4, doublings: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapValue<T> {
    pub cap: Digit,
    pub value: T,
}

/// h(ν|μ) = −∫(φ − P) dμ through the level sums
/// I_i(μ) = Σ_{ω∈Σ_N^i} μ([ω]) (φ − P)(x_ω), x_ω the canonical point of ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeEntropyIntegral<T> {
    /// Cesàro form −(1/k) Σ_{i≤k} I_i, comparable with the sum form at depth k.
    pub value: T,
    /// −I_k, the plain level-k approximation of −∫(φ − P) dμ.
    pub last: T,
    /// (ln Ĉ + Σ_j var_j φ)/k; bounds the distance to the sum form at depth k.
    pub error_bound: T,
    pub gibbs_constant: Option<T>,
    pub variation_sum: T,
    pub defect: T,
    pub k: usize,
    pub cap: Digit,
    /// Divergence to +∞ declared from the cap trend.
    pub infinite: bool,
    /// −I_k at the halved caps, smallest first, ending at `cap`.
    pub trend: Vec<CapValue<T>>,
}

/// The level sums I_1, …, I_k of φ − P under μ on Σ_N, and the mass seen at level k.
pub fn level_integrals<T, P, M>(phi: &P, pressure: T, mu: &M, k: usize, cap: Digit) -> Result<(Vec<T>, T)>
where
    T: Real,
    P: Potential<T> + ?Sized,
    M: CylinderMeasure<T> + ?Sized,
{
    if k == 0 {
        return Err(invalid("depth k must be positive"));
    }
    let mut levels = Vec::with_capacity(k);
    let mut mass = T::zero();
    for i in 1..=k {
        let mut acc = T::zero();
        let mut seen = T::zero();
        let mut bad: Option<Vec<Digit>> = None;
        for_each_positive(mu, i, cap, |w, m| {
            let v = phi.eval(w);
            if v == T::neg_infinity() {
                bad.get_or_insert_with(|| w.to_vec());
                return;
            }
            acc = acc + m * (v - pressure);
            seen = seen + m;
        })?;
        if let Some(w) = bad {
            return Err(Error::SupportMismatch(format!(
                "φ = −∞ on [{}] where μ is positive",
                format_digits(&w)
            )));
        }
        levels.push(acc);
        mass = seen;
    }
    Ok((levels, mass))
}

/// The integral form against an explicit potential and pressure (for instance
/// a pressure known in closed form). No Gibbs constant enters the bound.
pub fn relative_entropy_integral_with<T, P, M>(
    phi: &P,
    pressure: T,
    mu: &M,
    k: usize,
    cap: Digit,
    opts: &IntegralOptions,
) -> Result<RelativeEntropyIntegral<T>>
where
    T: Real,
    P: Potential<T> + ?Sized,
    M: CylinderMeasure<T> + ?Sized,
{
    let (levels, mass) = level_integrals(phi, pressure, mu, k, cap)?;
    let kk = T::from_usize_lossy(k);
    let value = -levels.iter().copied().sum::<T>() / kk;
    let last = -*levels.last().expect("k >= 1");
    let variation_sum = phi.variation_sum();
    let mut trend = Vec::new();
    let mut c = cap;
    for _ in 0..opts.doublings {
        c /= 2;
        if c == 0 {
            break;
        }
        let (lv, _) = level_integrals(phi, pressure, mu, k, c)?;
        trend.push(CapValue { cap: c, value: -*lv.last().expect("k >= 1") });
    }
    trend.reverse();
    trend.push(CapValue { cap, value: last });
    let infinite = diverging(&trend, T::c(-opts.threshold));
    Ok(RelativeEntropyIntegral {
        value,
        last,
        error_bound: variation_sum / kk,
        gibbs_constant: None,
        variation_sum,
        defect: T::one() - mass,
        k,
        cap,
        infinite,
        trend,
    })
}

/// Past the threshold, and the increments across cap doublings do not shrink.
fn diverging<T: Real>(trend: &[CapValue<T>], threshold: T) -> bool {
    let last = match trend.last() {
        Some(c) => c.value,
        None => return false,
    };
    if !(last >= threshold) {
        return false;
    }
    let steps: Vec<T> = trend.windows(2).map(|w| w[1].value - w[0].value).collect();
    !steps.is_empty() && steps.windows(2).all(|s| s[1] >= s[0]) && steps.iter().all(|&s| s > T::zero())
}

/// The integral form for a Gibbs model, on the model's alphabet and with its
/// pressure. The Gibbs constant is the larger of the model's stored estimate
/// and the worst ratio ν([ω]) / exp(S_kφ(x_ω) − kP̂) over μ-charged k-words.
pub fn relative_entropy_integral<T, M>(
    model: &GibbsModel<T>,
    mu: &M,
    k: usize,
    opts: &IntegralOptions,
) -> Result<RelativeEntropyIntegral<T>>
where
    T: Real,
    M: CylinderMeasure<T> + ?Sized,
{
    let phi = model.potential().as_ref();
    let mut out = relative_entropy_integral_with(phi, model.pressure(), mu, k, model.cap(), opts)?;
    let mut c = model.gibbs_constant().unwrap_or_else(T::one);
    for_each_positive(mu, k, model.cap(), |w, _| {
        let r = model.gibbs_ratio(w);
        if r.is_finite() && r > T::zero() {
            c = c.max(r).max(T::one() / r);
        }
    })?;
    out.gibbs_constant = Some(c);
    out.error_bound = (c.ln() + out.variation_sum) / T::from_usize_lossy(k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gibbs::{LocallyConstant, ModelOptions};
    use crate::measures::{Bernoulli, MarkovMeasure, PeriodicOrbitMeasure};

    #[test]
    fn cross_entropy_of_products() {
        let nu = Bernoulli::new(vec![0.5f64, 0.5]).unwrap();
        let mu = Bernoulli::new(vec![0.9f64, 0.1]).unwrap();
        for k in 1..=6 {
            let s = relative_entropy_sum(&nu, &mu, k, 2).unwrap();
            assert!((s.value - 2f64.ln()).abs() < 1e-12);
            let s = relative_entropy_sum(&nu, &nu, k, 2).unwrap();
            assert!((s.value - 2f64.ln()).abs() < 1e-12);
        }
        let q = Bernoulli::new(vec![0.3f64, 0.7]).unwrap();
        let one = PeriodicOrbitMeasure::new(vec![1]).unwrap();
        let s = relative_entropy_sum(&q, &one, 4, 2).unwrap();
        assert!((s.value + 0.3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn support_mismatch_is_typed() {
        let nu = Bernoulli::new(vec![1.0f64, 0.0]).unwrap();
        let mu = Bernoulli::new(vec![0.5f64, 0.5]).unwrap();
        assert!(matches!(relative_entropy_sum(&nu, &mu, 2, 2), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn bernoulli_potential_integral_is_exact() {
        let p = [0.2f64, 0.5, 0.3];
        let phi = Arc::new(LocallyConstant::log_weights(&p).unwrap());
        let model = GibbsModel::build(phi, 3, 1, &ModelOptions::default()).unwrap();
        let r = [0.6f64, 0.1, 0.3];
        let mu = Bernoulli::new(r.to_vec()).unwrap();
        let exact: f64 = r.iter().zip(&p).map(|(a, b)| -a * b.ln()).sum();
        let out = relative_entropy_integral(&model, &mu, 4, &IntegralOptions::default()).unwrap();
        assert!((out.value - exact).abs() < 1e-12);
        assert!((out.last - exact).abs() < 1e-12);
        assert!(!out.infinite);
        let sum = relative_entropy_sum(&model, &mu, 4, 3).unwrap();
        assert!((sum.value - out.value).abs() <= out.error_bound + 1e-12);
    }

    #[test]
    fn markov_pair_within_bound() {
        let rows = vec![vec![0.7f64, 0.3], vec![0.4, 0.6]];
        let mu = MarkovMeasure::order_one(&rows).unwrap();
        let phi = Arc::new(LocallyConstant::new(2, 2, vec![-0.1f64, -1.0, -0.5, -2.0], "pairs").unwrap());
        let model = GibbsModel::build(phi, 2, 1, &ModelOptions::default()).unwrap();
        let k = 6;
        let sum = relative_entropy_sum(&model, &mu, k, 2).unwrap();
        let int = relative_entropy_integral(&model, &mu, k, &IntegralOptions::default()).unwrap();
        assert!((sum.value - int.value).abs() <= int.error_bound + 1e-12);
    }

    #[test]
    fn steep_tail_flags_infinity() {
        let phi = LocallyConstant::from_letter_fn(16, "steep", |m| -(m as f64).exp()).unwrap();
        let mu = crate::measures::InverseSquare;
        let out = relative_entropy_integral_with(&phi, 0.0, &mu, 1, 16, &IntegralOptions::default()).unwrap();
        assert!(out.infinite, "{:?}", out.trend);
        let out = relative_entropy_integral_with(&phi, 0.0, &mu, 1, 8, &IntegralOptions::default()).unwrap();
        assert!(!out.infinite);
    }
}
