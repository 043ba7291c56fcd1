use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::symbolic::word::lex_index;
use crate::symbolic::Digit;

/// Potential of summable variation on ℕ^ℕ.
///
/// Points are represented by finite words extended by repeating their last digit
/// forever; `eval` returns φ at that point.
pub trait Potential<T: Real>: Send + Sync {
    /// Identifier with parameters, used to tag serialized models.
    fn id(&self) -> String;

    /// φ(ω·ω_n^∞) for a nonempty word ω.
    fn eval(&self, word: &[Digit]) -> T;

    /// Upper bound for var_n φ, n ≥ 1.
    fn variation(&self, n: usize) -> T;

    /// Upper bound for Σ_{n≥2} var_n φ.
    fn variation_sum(&self) -> T;

    /// Depth D such that φ(x) depends only on x_1..x_D.
    fn locally_constant_depth(&self) -> Option<usize> {
        None
    }

    /// Separable form of the transfer weights, when available.
    fn kernel(&self) -> Option<&dyn SplitKernel<T>> {
        None
    }

    /// Σ_i φ at the canonical representatives of the suffixes of ω.
    fn birkhoff_value(&self, word: &[Digit]) -> T {
        let n = word.len();
        let window = self.locally_constant_depth().unwrap_or(n).max(1);
        (0..n).map(|i| self.eval(&word[i..n.min(i + window)])).sum()
    }
}

/// Transfer weights of the form exp φ(b·v) = weight(b, coordinate(v)), with
/// weight smooth in its real argument. Enables fast transfer-operator products.
pub trait SplitKernel<T: Real>: Send + Sync {
    /// Real coordinate of the word v (with canonical tail).
    fn coordinate(&self, v: &[Digit]) -> T;

    /// exp φ(b·v) expressed through y = coordinate(v).
    fn weight(&self, b: Digit, y: T) -> T;
}

/// S_nφ along the canonical representative together with the bound Σ_{m≤n} var_m
/// on its distance to S_nφ(x) for any x in the cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffSum<T> {
    pub value: T,
    pub error_bound: T,
}

pub fn birkhoff_sum<T: Real, P: Potential<T> + ?Sized>(phi: &P, word: &[Digit]) -> BirkhoffSum<T> {
    let value = phi.birkhoff_value(word);
    let error_bound = (1..=word.len()).map(|m| phi.variation(m)).sum();
    BirkhoffSum { value, error_bound }
}

/// φ ≡ c.
#[derive(Clone, Copy, Debug)]
pub struct ConstantPotential<T>(pub T);

impl<T: Real> Potential<T> for ConstantPotential<T> {
    fn id(&self) -> String {
        format!("constant({})", self.0)
    }
    fn eval(&self, _word: &[Digit]) -> T {
        self.0
    }
    fn variation(&self, _n: usize) -> T {
        T::zero()
    }
    fn variation_sum(&self) -> T {
        T::zero()
    }
    fn locally_constant_depth(&self) -> Option<usize> {
        Some(1)
    }
    fn birkhoff_value(&self, word: &[Digit]) -> T {
        self.0 * T::from_usize_lossy(word.len())
    }
}

/// Potential depending on the first D letters through a table over {1..A}^D.
/// Words using a letter above A get −∞ (zero transfer weight).
#[derive(Clone, Debug)]
pub struct LocallyConstant<T> {
    depth: usize,
    alphabet: usize,
    values: Vec<T>,
    label: String,
}

impl<T: Real> LocallyConstant<T> {
    pub fn new(depth: usize, alphabet: usize, values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if depth == 0 || alphabet == 0 {
            return Err(invalid("depth and alphabet must be positive"));
        }
        let size = alphabet
            .checked_pow(depth as u32)
            .ok_or_else(|| invalid("table too large"))?;
        if values.len() != size {
            return Err(invalid(format!("expected {size} values, got {}", values.len())));
        }
        if values.iter().any(|v| v.is_nan() || *v == T::infinity()) {
            return Err(invalid("potential values must be below +∞"));
        }
        Ok(LocallyConstant { depth, alphabet, values, label: label.into() })
    }

    /// φ(x) = ln p_{x_1}.
    pub fn log_weights(p: &[T]) -> Result<Self> {
        if p.iter().any(|&x| !(x >= T::zero())) {
            return Err(invalid("weights must be nonnegative"));
        }
        let vals = p.iter().map(|&x| x.ln()).collect();
        let label = p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        LocallyConstant::new(1, p.len(), vals, format!("letters({label})"))
    }

    /// φ(x) = f(x_1) for letters up to the cap.
    pub fn from_letter_fn(cap: Digit, label: &str, f: impl Fn(Digit) -> T) -> Result<Self> {
        let vals = (1..=cap).map(f).collect();
        LocallyConstant::new(1, cap as usize, vals, label.to_string())
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }
}

impl<T: Real> Potential<T> for LocallyConstant<T> {
    fn id(&self) -> String {
        format!("locally-constant(depth={};{})", self.depth, self.label)
    }

    fn eval(&self, word: &[Digit]) -> T {
        let last = *word.last().expect("nonempty word");
        let mut buf = [0 as Digit; 16];
        let d = self.depth;
        let a = self.alphabet as Digit;
        let digit = |i: usize| if i < word.len() { word[i] } else { last };
        if (0..d).any(|i| digit(i) > a || digit(i) == 0) {
            return T::neg_infinity();
        }
        if d <= buf.len() {
            for (i, slot) in buf.iter_mut().take(d).enumerate() {
                *slot = digit(i);
            }
            self.values[lex_index(&buf[..d], a)]
        } else {
            let w: Vec<Digit> = (0..d).map(digit).collect();
            self.values[lex_index(&w, a)]
        }
    }

    fn variation(&self, n: usize) -> T {
        if n >= self.depth {
            return T::zero();
        }
        let finite: Vec<T> = self.values.iter().copied().filter(|v| v.is_finite()).collect();
        let hi = finite.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = finite.iter().copied().fold(T::infinity(), T::min);
        if finite.len() < self.values.len() {
            T::infinity()
        } else {
            hi - lo
        }
    }

    fn variation_sum(&self) -> T {
        (2..self.depth).map(|n| self.variation(n)).sum()
    }

    fn locally_constant_depth(&self) -> Option<usize> {
        Some(self.depth)
    }
}

/// φ + c for a constant c; used to normalize pressure to zero.
#[derive(Clone)]
pub struct ShiftedPotential<T> {
    inner: Arc<dyn Potential<T>>,
    shift: T,
}

impl<T: Real> ShiftedPotential<T> {
    pub fn new(inner: Arc<dyn Potential<T>>, shift: T) -> Self {
        ShiftedPotential { inner, shift }
    }
}

impl<T: Real> Potential<T> for ShiftedPotential<T> {
    fn id(&self) -> String {
        format!("{}+({})", self.inner.id(), self.shift)
    }
    fn eval(&self, word: &[Digit]) -> T {
        self.inner.eval(word) + self.shift
    }
    fn variation(&self, n: usize) -> T {
        self.inner.variation(n)
    }
    fn variation_sum(&self) -> T {
        self.inner.variation_sum()
    }
    fn locally_constant_depth(&self) -> Option<usize> {
        self.inner.locally_constant_depth()
    }
    fn birkhoff_value(&self, word: &[Digit]) -> T {
        self.inner.birkhoff_value(word) + self.shift * T::from_usize_lossy(word.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_birkhoff() {
        let c = ConstantPotential(0.25f64);
        assert_eq!(birkhoff_sum(&c, &[3, 1, 4]).value, 0.75);
    }

    #[test]
    fn letter_potential_birkhoff() {
        let p = LocallyConstant::log_weights(&[0.5f64, 0.3, 0.2]).unwrap();
        let s = birkhoff_sum(&p, &[1, 2]);
        assert!((s.value - (0.5f64.ln() + 0.3f64.ln())).abs() < 1e-15);
        assert_eq!(s.error_bound, 0.0);
        assert_eq!(p.eval(&[4]), f64::NEG_INFINITY);
    }

    #[test]
    fn depth_two_table_uses_canonical_tail() {
        let p = LocallyConstant::new(2, 2, vec![1.0f64, 2.0, 3.0, 4.0], "t").unwrap();
        assert_eq!(p.eval(&[2]), 4.0);
        assert_eq!(p.eval(&[1, 2, 1]), 2.0);
        assert_eq!(p.birkhoff_value(&[1, 2]), 2.0 + 4.0);
    }
}
