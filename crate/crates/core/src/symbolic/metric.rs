use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbolic::cylinder::CylinderMeasure;
use crate::symbolic::orbit::OrbitAccumulator;
use crate::symbolic::weights::{alphabet_tail, depth_tail, extension_factor};
use crate::symbolic::word::{format_digits, lex_index, Digit};

/// Interval-valued distance: the true d* lies in `[value, value + tail]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance<T> {
    pub value: T,
    pub tail: T,
}

impl<T: Real> Distance<T> {
    pub fn upper(&self) -> T {
        self.value + self.tail
    }
}

const MASS_SLACK: f64 = 1e-12;

fn check_mass<T: Real>(word: &[Digit], m: T) -> Result<()> {
    let slack = T::c(MASS_SLACK);
    if !(m >= -slack && m <= T::one() + slack) {
        return Err(Error::MassOutOfRange {
            word: format_digits(word),
            mass: m.as_f64(),
        });
    }
    Ok(())
}

fn support_within<T: Real, M: CylinderMeasure<T> + ?Sized>(mu: &M, cap: Digit) -> bool {
    matches!(mu.support_cap(), Some(c) if c <= cap)
}

/// Tail bound for truncating at the given caps: all deeper words, plus words using
/// letters above the cap unless both measures vanish there.
pub fn truncation_tail<T: Real>(depth_cap: usize, alphabet_cap: Digit, both_within: bool) -> T {
    let mut tail = depth_tail::<T>(depth_cap);
    if !both_within {
        tail = tail + alphabet_tail::<T>(depth_cap, alphabet_cap);
    }
    tail
}

/// Truncated d*(μ, λ) = Σ a(ω)|μ([ω]) − λ([ω])| over words of length ≤ `depth_cap`
/// with letters ≤ `alphabet_cap`, with a closed-form bound on the remainder.
///
/// Subtrees where both measures vanish are skipped.
pub fn d_star<T, A, B>(mu: &A, lambda: &B, depth_cap: usize, alphabet_cap: Digit) -> Result<Distance<T>>
where
    T: Real,
    A: CylinderMeasure<T> + ?Sized,
    B: CylinderMeasure<T> + ?Sized,
{
    if alphabet_cap == 0 {
        return Err(Error::InvalidInput("alphabet cap must be positive".into()));
    }
    let mut value = T::zero();
    let mut failure: Option<Error> = None;
    let mut weights: Vec<T> = Vec::with_capacity(depth_cap + 1);
    weights.push(T::one());
    crate::symbolic::cylinder::walk_words(depth_cap, alphabet_cap, |w| {
        if failure.is_some() {
            return false;
        }
        weights.truncate(w.len());
        let a = weights[w.len() - 1] * extension_factor::<T>(*w.last().unwrap());
        weights.push(a);
        let m1 = mu.mass(w);
        let m2 = lambda.mass(w);
        if let Err(e) = check_mass(w, m1).and_then(|_| check_mass(w, m2)) {
            failure = Some(e);
            return false;
        }
        if m1 == T::zero() && m2 == T::zero() {
            return false;
        }
        value = value + a * (m1 - m2).abs();
        true
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let within = support_within(mu, alphabet_cap) && support_within(lambda, alphabet_cap);
    Ok(Distance {
        value,
        tail: truncation_tail(depth_cap, alphabet_cap, within),
    })
}

/// d* between the empirical orbit measure recorded in `acc` and μ, over words of
/// length ≤ `depth_cap` with letters ≤ `alphabet_cap`.
///
/// The caps must not exceed the accumulator's own window and alphabet caps.
pub fn d_star_orbit<T, M>(acc: &OrbitAccumulator, mu: &M, depth_cap: usize, alphabet_cap: Digit) -> Result<Distance<T>>
where
    T: Real,
    M: CylinderMeasure<T> + ?Sized,
{
    if depth_cap > acc.k_max() || alphabet_cap > acc.alphabet_cap() {
        return Err(Error::CapMismatch(format!(
            "requested depth {depth_cap}, cap {alphabet_cap}; accumulator has k_max {}, N {}",
            acc.k_max(),
            acc.alphabet_cap()
        )));
    }
    let n_acc = acc.alphabet_cap();
    let mut value = T::zero();
    let mut failure: Option<Error> = None;
    let mut weights: Vec<T> = vec![T::one()];
    crate::symbolic::cylinder::walk_words(depth_cap, alphabet_cap, |w| {
        if failure.is_some() {
            return false;
        }
        weights.truncate(w.len());
        let a = weights[w.len() - 1] * extension_factor::<T>(*w.last().unwrap());
        weights.push(a);
        let k = w.len();
        let count = acc.count_at(k, lex_index(w, n_acc));
        let p = if acc.windows(k) == 0 {
            T::zero()
        } else {
            T::c(count as f64 / acc.windows(k) as f64)
        };
        let m = mu.mass(w);
        if let Err(e) = check_mass(w, m) {
            failure = Some(e);
            return false;
        }
        if count == 0 && m == T::zero() {
            return false;
        }
        value = value + a * (p - m).abs();
        true
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let within = support_within(mu, alphabet_cap)
        && acc.max_digit_seen() <= alphabet_cap
        && (1..=depth_cap).all(|k| acc.overflow(k) == 0);
    Ok(Distance {
        value,
        tail: truncation_tail(depth_cap, alphabet_cap, within),
    })
}
