use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::symbolic::{CylinderMeasure, Digit};

/// Uniform measure on the orbit of w^∞: (1/|w|) Σ_i δ_{T^i(w^∞)}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicOrbitMeasure {
    period: Vec<Digit>,
}

impl PeriodicOrbitMeasure {
    pub fn new(period: Vec<Digit>) -> Result<Self> {
        if period.is_empty() || period.contains(&0) {
            return Err(invalid("period word must be nonempty with positive digits"));
        }
        Ok(PeriodicOrbitMeasure { period })
    }

    pub fn period(&self) -> &[Digit] {
        &self.period
    }

    fn matches(&self, shift: usize, word: &[Digit]) -> bool {
        let p = self.period.len();
        word.iter().enumerate().all(|(i, &d)| self.period[(shift + i) % p] == d)
    }
}

impl<T: Real> CylinderMeasure<T> for PeriodicOrbitMeasure {
    fn mass(&self, word: &[Digit]) -> T {
        let p = self.period.len();
        let hits = (0..p).filter(|&i| self.matches(i, word)).count();
        T::from_usize_lossy(hits) / T::from_usize_lossy(p)
    }

    fn support_cap(&self) -> Option<Digit> {
        self.period.iter().copied().max()
    }

    fn describe(&self) -> String {
        format!("periodic({})", crate::symbolic::word::format_digits(&self.period))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_of_cyclic_positions() {
        let m = PeriodicOrbitMeasure::new(vec![1, 1, 2]).unwrap();
        assert!((CylinderMeasure::<f64>::mass(&m, &[1]) - 2.0 / 3.0).abs() < 1e-15);
        assert!((CylinderMeasure::<f64>::mass(&m, &[2, 1, 1, 2]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(CylinderMeasure::<f64>::mass(&m, &[2, 2]), 0.0);
    }
}
