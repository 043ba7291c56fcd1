use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbolic::{Digit, Word};

/// Largest partial quotient accepted by [`cf_encode`].
pub const DIGIT_GUARD: f64 = 4.0e9;

/// First n partial quotients of x ∈ (0,1) under S(x) = 1/x − ⌊1/x⌋.
///
/// Floating-point digits are reliable while q_n² times the unit roundoff stays
/// well below one (about 35 digits for the golden mean in `f64`).
pub fn cf_encode<T: Real>(x: T, n: usize) -> Result<Word> {
    if !(x > T::zero() && x < T::one()) {
        return Err(Error::InvalidInput(format!("{x} is not in (0,1)")));
    }
    let mut digits = Vec::with_capacity(n);
    let mut y = x;
    for _ in 0..n {
        if y == T::zero() {
            return Err(Error::InvalidInput(format!(
                "rational point: expansion terminates after {}",
                Word::new(digits.clone()).map(|w| w.to_string()).unwrap_or_default()
            )));
        }
        let inv = T::one() / y;
        let a = inv.floor();
        if a.as_f64() > DIGIT_GUARD {
            return Err(Error::Numeric(format!("partial quotient {a} above the overflow guard")));
        }
        digits.push(a.as_f64() as Digit);
        y = inv - a;
    }
    Word::new(digits)
}

/// κ(ω·y): the point whose expansion starts with ω and continues with the point y.
pub fn fold<T: Real>(word: &[Digit], y: T) -> T {
    word.iter().rev().fold(y, |acc, &d| T::one() / (T::c(d as f64) + acc))
}

/// κ(a^∞) = (√(a²+4) − a)/2.
pub fn periodic_point<T: Real>(a: Digit) -> T {
    let a = T::c(a as f64);
    // 2/(a + √(a²+4)) avoids cancellation for large a
    T::c(2.0) / (a + (a * a + T::c(4.0)).sqrt())
}

/// κ(ω·ω_n^∞), the canonical representative of the cylinder.
pub fn canonical_point<T: Real>(word: &[Digit]) -> T {
    match word.last() {
        Some(&d) => fold(&word[..word.len() - 1], periodic_point::<T>(d)),
        None => T::zero(),
    }
}

/// Continuant state in log form: ln q_n and the ratio q_{n−1}/q_n ∈ (0,1].
///
/// The recurrence q_n = a_n q_{n−1} + q_{n−2} becomes
/// ln q_n = ln q_{n−1} + ln(a_n + r_{n−1}), r_n = 1/(a_n + r_{n−1}),
/// which never overflows and accepts digits given by their logarithm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LogContinuant {
    pub ln_q: f64,
    pub ratio: f64,
    pub depth: usize,
}

impl LogContinuant {
    pub fn new() -> Self {
        LogContinuant { ln_q: 0.0, ratio: 0.0, depth: 0 }
    }

    pub fn push(&mut self, a: Digit) {
        let step = a as f64 + self.ratio;
        self.ln_q += step.ln();
        self.ratio = 1.0 / step;
        self.depth += 1;
    }

    /// Appends a digit given as ln a (for digits too large for an integer type).
    pub fn push_log(&mut self, ln_a: f64) {
        // ln(a + r) = ln a + ln(1 + r/a)
        let ln_step = ln_a + (self.ratio * (-ln_a).exp()).ln_1p();
        self.ln_q += ln_step;
        self.ratio = (-ln_step).exp();
        self.depth += 1;
    }

    /// ln |Δ(a_1⋯a_n)| = −2 ln q_n − ln(1 + q_{n−1}/q_n).
    pub fn log_interval_length(&self) -> f64 {
        -2.0 * self.ln_q - self.ratio.ln_1p()
    }
}

/// Partial quotients with their exact continuants p_k, q_k while these fit in f64.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CFPoint {
    digits: Vec<Digit>,
    p: (f64, f64),
    q: (f64, f64),
    log: LogContinuant,
}

impl Default for CFPoint {
    fn default() -> Self {
        CFPoint::new()
    }
}

impl CFPoint {
    pub fn new() -> Self {
        // (p_{k−1}, p_k), (q_{k−1}, q_k) at k = 0: p_{−1} = 1, p_0 = 0, q_{−1} = 0, q_0 = 1
        CFPoint { digits: Vec::new(), p: (1.0, 0.0), q: (0.0, 1.0), log: LogContinuant::new() }
    }

    pub fn from_digits(digits: &[Digit]) -> Self {
        let mut c = CFPoint::new();
        for &d in digits {
            c.push(d);
        }
        c
    }

    pub fn push(&mut self, a: Digit) {
        let af = a as f64;
        self.p = (self.p.1, af * self.p.1 + self.p.0);
        self.q = (self.q.1, af * self.q.1 + self.q.0);
        self.log.push(a);
        self.digits.push(a);
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    /// q_n (infinite once beyond f64 range).
    pub fn q(&self) -> f64 {
        self.q.1
    }
    pub fn q_prev(&self) -> f64 {
        self.q.0
    }
    pub fn p(&self) -> f64 {
        self.p.1
    }
    pub fn p_prev(&self) -> f64 {
        self.p.0
    }
    pub fn log_continuant(&self) -> LogContinuant {
        self.log
    }

    /// The endpoints of Δ(a_1⋯a_n) in increasing order.
    pub fn endpoints(&self) -> (f64, f64) {
        let a = fold(&self.digits, 0.0f64);
        let b = fold(&self.digits, 1.0f64);
        (a.min(b), a.max(b))
    }
}

/// |Δ(ω)| = 1/(q_n(q_n + q_{n−1})).
pub fn basic_interval_length<T: Real>(word: &[Digit]) -> Result<T> {
    if word.is_empty() {
        return Err(Error::InvalidInput("basic interval of the empty word".into()));
    }
    let c = CFPoint::from_digits(word);
    let len = if c.q() < 1e150 {
        1.0 / (c.q() * (c.q() + c.q_prev()))
    } else {
        c.log_continuant().log_interval_length().exp()
    };
    Ok(T::c(len))
}

/// ln |Δ(ω)|, finite at any depth.
pub fn log_basic_interval_length(word: &[Digit]) -> f64 {
    let mut c = LogContinuant::new();
    for &d in word {
        c.push(d);
    }
    c.log_interval_length()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_expansions() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(cf_encode(golden, 20).unwrap().digits().iter().all(|&d| d == 1));
        let r2 = 2f64.sqrt() - 1.0;
        assert!(cf_encode(r2, 15).unwrap().digits().iter().all(|&d| d == 2));
        let e = cf_encode(1.0f64 / 3.0, 4).unwrap_err();
        assert!(e.to_string().contains("terminates after 3"), "{e}");
    }

    #[test]
    fn interval_lengths() {
        assert!((basic_interval_length::<f64>(&[1]).unwrap() - 0.5).abs() < 1e-15);
        assert!((basic_interval_length::<f64>(&[2, 1]).unwrap() - 1.0 / 15.0).abs() < 1e-15);
        let c = CFPoint::from_digits(&[2, 1]);
        let (lo, hi) = c.endpoints();
        assert!((lo - 1.0 / 3.0).abs() < 1e-15 && (hi - 0.4).abs() < 1e-15);
        assert_eq!((c.q(), c.q_prev()), (3.0, 2.0));
    }

    #[test]
    fn log_and_direct_lengths_agree() {
        let w = [3u32, 1, 4, 1, 5, 9, 2, 6];
        let direct = basic_interval_length::<f64>(&w).unwrap().ln();
        assert!((direct - log_basic_interval_length(&w)).abs() < 1e-13);
        let mut c = LogContinuant::new();
        for &d in &w {
            c.push_log((d as f64).ln());
        }
        assert!((c.log_interval_length() - direct).abs() < 1e-12);
    }

    #[test]
    fn canonical_point_of_ones_is_golden() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((canonical_point::<f64>(&[1, 1, 1]) - g).abs() < 1e-15);
        assert!((periodic_point::<f64>(2) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }
}
