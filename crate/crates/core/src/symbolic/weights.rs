use crate::scalar::{inverse_square_head, inverse_square_norm, Real};
use crate::symbolic::word::Digit;

/// Cylinder weight a(ω) = 2^(−n) Π (6/π²) ω_i^(−2); the empty word has weight 0.
///
/// Summed over all words of length n the weights give 2^(−n), so the total
/// over all nonempty words is 1.
pub fn weight<T: Real>(word: &[Digit]) -> T {
    if word.is_empty() {
        return T::zero();
    }
    let c = inverse_square_norm::<T>() / T::c(2.0);
    word.iter().fold(T::one(), |acc, &d| {
        let d = T::c(d as f64);
        acc * c / (d * d)
    })
}

/// Weight of the one-letter extension relative to the parent: a(ωd) = a(ω)·factor(d).
pub fn extension_factor<T: Real>(d: Digit) -> T {
    let d = T::c(d as f64);
    inverse_square_norm::<T>() / (T::c(2.0) * d * d)
}

/// Σ_{ω ∈ Σ_N^n} a(ω) = 2^(−n) S_N^n where S_N is the inverse-square mass of 1..=N.
pub fn level_total<T: Real>(n: usize, alphabet_cap: Digit) -> T {
    let s = inverse_square_head(alphabet_cap as u64);
    T::c(0.5f64.powi(n as i32) * s.powi(n as i32))
}

/// Total weight of words of length ≤ depth containing some letter above the cap.
pub fn alphabet_tail<T: Real>(depth: usize, alphabet_cap: Digit) -> T {
    let s = inverse_square_head(alphabet_cap as u64);
    // 1 − s^n computed as −expm1(n ln s) to keep precision for s close to 1
    let ln_s = s.ln();
    let mut tail = 0.0;
    for n in 1..=depth {
        tail += 0.5f64.powi(n as i32) * -(n as f64 * ln_s).exp_m1();
    }
    T::c(tail)
}

/// Total weight of all words longer than `depth`: Σ_{n > depth} 2^(−n) = 2^(−depth).
pub fn depth_tail<T: Real>(depth: usize) -> T {
    T::c(0.5f64.powi(depth as i32))
}
