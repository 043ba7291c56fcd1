//! Floating-point abstraction used throughout the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar type for masses, entropies and eigenvectors.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in the documentation
/// assume `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`.
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// 6/π², the normalizer of the inverse-square law on the positive integers.
pub fn inverse_square_norm<T: Real>() -> T {
    T::c(6.0) / (T::PI() * T::PI())
}

/// Trigamma function ψ'(x) for x > 0.
pub fn trigamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 16.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    // asymptotic series
    acc + 1.0 / x
        + x2 / 2.0
        + (1.0 / x)
            * x2
            * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0 - x2 * 5.0 / 66.0))))
}

/// (6/π²) Σ_{m ≤ n} m^(−2), the inverse-square mass of the letters 1..=n.
pub fn inverse_square_head(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 64 {
        let s: f64 = (1..=n).map(|m| 1.0 / (m as f64 * m as f64)).sum();
        return 6.0 / (std::f64::consts::PI * std::f64::consts::PI) * s;
    }
    1.0 - inverse_square_tail(n)
}

/// (6/π²) Σ_{m > n} m^(−2) = (6/π²) ψ'(n+1), computed without cancellation.
pub fn inverse_square_tail(n: u64) -> f64 {
    6.0 / (std::f64::consts::PI * std::f64::consts::PI) * trigamma(n as f64 + 1.0)
}

/// ln Σ exp(v) over the slice, stable for large negative entries.
pub fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let m = values.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return m;
    }
    let s: T = values.iter().map(|&v| (v - m).exp()).sum();
    m + s.ln()
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigamma_matches_zeta_two() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((trigamma(1.0) - z2).abs() < 1e-14);
        assert!((trigamma(2.0) - (z2 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn head_and_tail_agree_with_direct_sums() {
        for n in [1u64, 3, 10, 65, 200, 5000] {
            let direct: f64 = (1..=n).map(|m| 1.0 / (m as f64).powi(2)).sum::<f64>() * 6.0
                / std::f64::consts::PI.powi(2);
            assert!((inverse_square_head(n) - direct).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn log_sum_exp_handles_underflow() {
        let v = [-1000.0f64, -1000.0];
        assert!((log_sum_exp(&v) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
