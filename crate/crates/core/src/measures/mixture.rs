use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::measures::bernoulli::InverseSquare;
use crate::scalar::Real;
use crate::symbolic::{CylinderMeasure, Digit};

/// Convex combination Σ w_i μ_i of cylinder measures.
#[derive(Clone)]
pub struct Mixture<T> {
    parts: Vec<(T, Arc<dyn CylinderMeasure<T>>)>,
}

impl<T: Real> Mixture<T> {
    pub fn new(parts: Vec<(T, Arc<dyn CylinderMeasure<T>>)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("mixture needs at least one component"));
        }
        if parts.iter().any(|(w, _)| !(*w >= T::zero())) {
            return Err(invalid("mixture weights must be nonnegative"));
        }
        let s: T = parts.iter().map(|(w, _)| *w).sum();
        if (s - T::one()).abs() > T::c(1e-12) {
            return Err(invalid(format!("mixture weights sum to {s}")));
        }
        Ok(Mixture { parts })
    }

    /// (1 − ε)μ + ε·μ₀ with μ₀ the inverse-square Bernoulli measure, which gives
    /// every cylinder positive mass.
    pub fn smoothed(mu: Arc<dyn CylinderMeasure<T>>, eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(invalid("smoothing weight must lie in (0,1)"));
        }
        Mixture::new(vec![(T::one() - eps, mu), (eps, Arc::new(InverseSquare))])
    }
}

impl<T: Real> CylinderMeasure<T> for Mixture<T> {
    fn mass(&self, word: &[Digit]) -> T {
        self.parts.iter().map(|(w, m)| *w * m.mass(word)).sum()
    }

    fn support_cap(&self) -> Option<Digit> {
        self.parts
            .iter()
            .filter(|(w, _)| *w > T::zero())
            .map(|(_, m)| m.support_cap())
            .try_fold(0, |acc, c| c.map(|c| acc.max(c)))
    }

    fn is_exact(&self) -> bool {
        self.parts.iter().all(|(_, m)| m.is_exact())
    }

    fn describe(&self) -> String {
        let p: Vec<String> = self.parts.iter().map(|(w, m)| format!("{w}*{}", m.describe())).collect();
        format!("mixture({})", p.join(" + "))
    }
}
