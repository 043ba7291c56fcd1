use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gibbs::Potential;
use crate::scalar::{linear_fit, Real};
use crate::symbolic::{CylinderMeasure, Digit};

/// Σ_{n≤N} ν([π(n)])^t at the two probe exponents, over the first half and the
/// whole of the range. A summable probe has nearly equal half and full sums.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSumTest<T> {
    pub t_low: T,
    pub t_high: T,
    pub low_half: T,
    pub low_full: T,
    pub high_half: T,
    pub high_full: T,
}

/// Estimate of the convergence exponent α_ν of the 1-cylinder masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceExponent<T> {
    pub alpha: T,
    /// Slope of −ln ν([π(n)]) against ln n; zero when no fit was made.
    pub slope: T,
    pub intercept: T,
    /// Ranks used in the fit with the fitted values −ln ν([π(n)]).
    pub points: Vec<(usize, T)>,
    pub rank_max: usize,
    /// ν has finitely many positive 1-cylinders, so α = 0.
    pub finite_support: bool,
    pub clamped: bool,
    pub partial_sums: Option<PartialSumTest<T>>,
}

const MIN_POINTS: usize = 8;
const PROBE: f64 = 0.05;

/// α̂ from ln ν([n]) for n = 1..=log_masses.len().
///
/// Masses are sorted decreasingly (ties by digit), −ln ν([π(n)]) is regressed on
/// ln n at n = 2^m for m in the upper half of the dyadic range, and α̂ = 1/slope
/// clamped to [0, 1].
pub fn convergence_exponent_from_log_masses<T: Real>(log_masses: &[T]) -> Result<ConvergenceExponent<T>> {
    let n_max = log_masses.len();
    if let Some(i) = log_masses.iter().position(|v| v.is_nan() || *v > T::c(1e-12)) {
        return Err(invalid(format!("log-mass of digit {} is {}", i + 1, log_masses[i])));
    }
    if let Some(i) = log_masses.iter().position(|v| *v == T::neg_infinity()) {
        return Err(Error::SupportMismatch(format!("zero 1-cylinder mass at digit {} within rank {n_max}", i + 1)));
    }
    let top = usize::BITS - 1 - n_max.max(1).leading_zeros();
    let lo = top.div_ceil(2);
    let count = (top + 1).saturating_sub(lo) as usize;
    if count < MIN_POINTS {
        return Err(invalid(format!(
            "rank {n_max} gives {count} dyadic points, at least {MIN_POINTS} needed"
        )));
    }
    let mut sorted = log_masses.to_vec();
    // stable, so equal masses keep digit order
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite log-masses"));
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for m in lo..=top {
        let n = 1usize << m;
        let y = -sorted[n - 1];
        xs.push(T::from_usize_lossy(n).ln());
        ys.push(y);
        points.push((n, y));
    }
    let (slope, intercept) = linear_fit(&xs, &ys);
    let raw = if slope > T::zero() { T::one() / slope } else { T::infinity() };
    let alpha = raw.max(T::zero()).min(T::one());
    let clamped = alpha != raw;
    let partial_sums = Some(partial_sum_test(&sorted, alpha));
    Ok(ConvergenceExponent {
        alpha,
        slope,
        intercept,
        points,
        rank_max: n_max,
        finite_support: false,
        clamped,
        partial_sums,
    })
}

fn partial_sum_test<T: Real>(sorted: &[T], alpha: T) -> PartialSumTest<T> {
    let probe = T::c(PROBE);
    let t_low = (alpha - probe).max(T::zero());
    let t_high = alpha + probe;
    let half = sorted.len() / 2;
    let sums = |t: T| {
        let mut h = T::zero();
        let mut acc = T::zero();
        for (i, &lm) in sorted.iter().enumerate() {
            acc = acc + (t * lm).exp();
            if i + 1 == half {
                h = acc;
            }
        }
        (h, acc)
    };
    let (low_half, low_full) = sums(t_low);
    let (high_half, high_full) = sums(t_high);
    PartialSumTest { t_low, t_high, low_half, low_full, high_half, high_full }
}

fn finite_support<T: Real>(rank_max: usize) -> ConvergenceExponent<T> {
    ConvergenceExponent {
        alpha: T::zero(),
        slope: T::zero(),
        intercept: T::zero(),
        points: Vec::new(),
        rank_max,
        finite_support: true,
        clamped: false,
        partial_sums: None,
    }
}

/// α̂ for ν using the masses of [1], …, [n_max].
///
/// A measure whose declared support is finite and below `n_max` has α = 0: every
/// series Σ ν([n])^t is a finite sum.
pub fn convergence_exponent<T: Real, M: CylinderMeasure<T> + ?Sized>(nu: &M, n_max: usize) -> Result<ConvergenceExponent<T>> {
    if let Some(cap) = nu.support_cap() {
        if (cap as usize) < n_max {
            return Ok(finite_support(cap as usize));
        }
    }
    let logs: Vec<T> = (1..=n_max as Digit).map(|n| nu.log_mass(&[n])).collect();
    convergence_exponent_from_log_masses(&logs)
}

/// α̂ from the Gibbs proxy masses exp(φ(n^∞) − P) of a potential, which are
/// comparable to ν([n]) up to the Gibbs constant. Digits where φ = −∞ at the
/// start of a run to `n_max` mark finite support.
pub fn potential_exponent<T: Real, P: Potential<T> + ?Sized>(phi: &P, pressure: T, n_max: usize) -> Result<ConvergenceExponent<T>> {
    let logs: Vec<T> = (1..=n_max as Digit).map(|n| phi.eval(&[n]) - pressure).collect();
    if let Some(first) = logs.iter().position(|v| *v == T::neg_infinity()) {
        if logs[first..].iter().all(|v| *v == T::neg_infinity()) {
            return Ok(finite_support(first));
        }
    }
    convergence_exponent_from_log_masses(&logs)
}
