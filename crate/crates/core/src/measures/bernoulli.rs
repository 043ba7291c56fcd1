use crate::error::{invalid, Result};
use crate::scalar::{inverse_square_norm, Real};
use crate::symbolic::{CylinderMeasure, Digit};

/// Bernoulli measure with finitely many letters: μ([ω]) = Π p_{ω_i}.
#[derive(Clone, Debug, PartialEq)]
pub struct Bernoulli<T> {
    weights: Vec<T>,
    log_weights: Vec<T>,
}

impl<T: Real> Bernoulli<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("Bernoulli measure needs at least one letter"));
        }
        if weights.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(invalid("Bernoulli weights must be finite and nonnegative"));
        }
        let s: T = weights.iter().copied().sum();
        if (s - T::one()).abs() > T::c(1e-12) {
            return Err(invalid(format!("Bernoulli weights sum to {s}, not 1")));
        }
        let log_weights = weights.iter().map(|p| p.ln()).collect();
        Ok(Bernoulli { weights, log_weights })
    }

    /// Normalizes exp(w_a) in log space, so letters whose mass underflows keep a
    /// finite log-mass.
    pub fn from_log_weights(raw: &[T]) -> Result<Self> {
        if raw.is_empty() || raw.iter().any(|w| w.is_nan() || *w == T::infinity()) {
            return Err(invalid("log-weights must be finite or -inf"));
        }
        let z = crate::scalar::log_sum_exp(raw);
        if !z.is_finite() {
            return Err(invalid("log-weights must have a finite maximum"));
        }
        let log_weights: Vec<T> = raw.iter().map(|&w| w - z).collect();
        let weights = log_weights.iter().map(|w| w.exp()).collect();
        Ok(Bernoulli { weights, log_weights })
    }

    /// Normalizes positive weights to a probability vector.
    pub fn normalized(raw: Vec<T>) -> Result<Self> {
        let s: T = raw.iter().copied().sum();
        if !(s > T::zero()) {
            return Err(invalid("weights must have positive sum"));
        }
        Bernoulli::new(raw.into_iter().map(|p| p / s).collect())
    }

    pub fn uniform(letters: usize) -> Result<Self> {
        Bernoulli::new(vec![T::one() / T::from_usize_lossy(letters); letters])
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn letter(&self, a: Digit) -> T {
        (a as usize).checked_sub(1).and_then(|i| self.weights.get(i)).copied().unwrap_or_else(T::zero)
    }

    /// −Σ p_a ln p_a.
    pub fn entropy(&self) -> T {
        self.weights
            .iter()
            .filter(|&&p| p > T::zero())
            .map(|&p| -p * p.ln())
            .sum()
    }
}

impl<T: Real> CylinderMeasure<T> for Bernoulli<T> {
    fn mass(&self, word: &[Digit]) -> T {
        word.iter().fold(T::one(), |acc, &d| acc * self.letter(d))
    }

    fn log_mass(&self, word: &[Digit]) -> T {
        word.iter()
            .map(|&d| (d as usize).checked_sub(1).and_then(|i| self.log_weights.get(i)).copied().unwrap_or_else(T::neg_infinity))
            .sum()
    }

    fn support_cap(&self) -> Option<Digit> {
        Some(self.weights.len() as Digit)
    }

    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        let m = self.mass(word);
        out.clear();
        out.extend((1..=cap).map(|a| m * self.letter(a)));
    }

    fn describe(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(|p| p.to_string()).collect();
        format!("bernoulli({})", w.join(","))
    }
}

/// Bernoulli measure on all of ℕ with letter masses 6/(π² n²).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InverseSquare;

impl InverseSquare {
    pub fn letter<T: Real>(a: Digit) -> T {
        let a = T::c(a as f64);
        inverse_square_norm::<T>() / (a * a)
    }
}

impl<T: Real> CylinderMeasure<T> for InverseSquare {
    fn mass(&self, word: &[Digit]) -> T {
        word.iter().fold(T::one(), |acc, &d| acc * Self::letter::<T>(d))
    }

    fn log_mass(&self, word: &[Digit]) -> T {
        word.iter().map(|&d| Self::letter::<T>(d).ln()).sum()
    }

    fn support_cap(&self) -> Option<Digit> {
        None
    }

    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        let m: T = self.mass(word);
        out.clear();
        out.extend((1..=cap).map(|a| m * Self::letter::<T>(a)));
    }

    fn describe(&self) -> String {
        "inverse-square bernoulli".into()
    }
}
