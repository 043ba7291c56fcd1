use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symbolic::{d_star_orbit, CylinderMeasure, Digit, DigitSource, OrbitAccumulator};

/// Truncated d*(Δ_{x,n}, μ) at increasing horizons n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub horizons: Vec<usize>,
    pub distances: Vec<f64>,
    /// Truncation tail shared by every horizon.
    pub tail: f64,
    /// Strictly decreasing along the horizons.
    pub decreasing: bool,
    /// Largest digit seen up to the last horizon.
    pub max_digit: Digit,
}

impl Trajectory {
    pub fn last(&self) -> f64 {
        *self.distances.last().expect("nonempty")
    }
}

/// Streams x once, recording d* against μ (words of length ≤ depth, letters ≤ cap)
/// at each horizon.
pub fn verify_generic<S, M>(x: &S, mu: &M, horizons: &[usize], depth: usize, cap: Digit) -> Result<Trajectory>
where
    S: DigitSource + ?Sized,
    M: CylinderMeasure<f64> + ?Sized,
{
    let mut hs: Vec<usize> = horizons.to_vec();
    hs.sort_unstable();
    hs.dedup();
    if hs.is_empty() || hs[0] == 0 {
        return Err(invalid("horizons must be positive"));
    }
    let mut acc = OrbitAccumulator::new(depth, cap)?;
    let mut it = x.digits();
    let mut seen = 0usize;
    let mut distances = Vec::with_capacity(hs.len());
    let mut tail = 0.0;
    for &h in &hs {
        while seen < h {
            let d = it.next().ok_or(Error::StreamExhausted { got: seen, needed: h })?;
            acc.push(d);
            seen += 1;
        }
        let dist = d_star_orbit::<f64, _>(&acc, mu, depth, cap)?;
        tail = dist.tail;
        distances.push(dist.value);
    }
    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    Ok(Trajectory { horizons: hs, distances, tail, decreasing, max_digit: acc.max_digit_seen() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Bernoulli, PeriodicOrbitMeasure};
    use crate::symbolic::Periodic;

    #[test]
    fn periodic_point_converges_to_its_orbit_measure() {
        let mu = PeriodicOrbitMeasure::new(vec![1, 2, 2]).unwrap();
        let t = verify_generic(&Periodic(vec![1, 2, 2]), &mu, &[10, 100, 1000], 4, 3).unwrap();
        assert!(t.decreasing, "{:?}", t.distances);
        assert!(t.last() < 1e-2);
    }

    #[test]
    fn wrong_measure_stays_away() {
        let mu = Bernoulli::new(vec![0.5, 0.5]).unwrap();
        let t = verify_generic(&Periodic(vec![1]), &mu, &[100, 1000], 4, 2).unwrap();
        assert!(t.last() > 0.1);
    }
}
