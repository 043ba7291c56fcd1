use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::symbolic::{CylinderMeasure, DigitSource};

/// r_n = ln ref([x|n]) / ln ν([x|n]) along a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalDimension<T> {
    pub depths: Vec<usize>,
    pub ratios: Vec<T>,
    /// Minimum of r_n over depths in the upper half of the schedule.
    pub liminf: T,
}

/// Roughly `per_octave` depths per doubling from 1 to `n_max`, always ending at `n_max`.
pub fn geometric_schedule(n_max: usize, per_octave: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if n_max == 0 {
        return out;
    }
    let step = 2f64.powf(1.0 / per_octave.max(1) as f64);
    let mut x = 1.0f64;
    while (x as usize) < n_max {
        let n = x as usize;
        if out.last() != Some(&n) {
            out.push(n);
        }
        x *= step;
    }
    out.push(n_max);
    out
}

pub fn local_dimension<T, S, N, R>(x: &S, nu: &N, reference: &R, depths: &[usize]) -> Result<LocalDimension<T>>
where
    T: Real,
    S: DigitSource + ?Sized,
    N: CylinderMeasure<T> + ?Sized,
    R: CylinderMeasure<T> + ?Sized,
{
    let mut depths: Vec<usize> = depths.iter().copied().filter(|&n| n > 0).collect();
    depths.sort_unstable();
    depths.dedup();
    let n_max = *depths.last().ok_or_else(|| invalid("empty depth schedule"))?;
    let prefix = x.prefix(n_max);
    if prefix.len() < n_max {
        return Err(Error::StreamExhausted { got: prefix.len(), needed: n_max });
    }
    let mut kept = Vec::with_capacity(depths.len());
    let mut ratios = Vec::with_capacity(depths.len());
    for &n in &depths {
        let w = &prefix[..n];
        let ln_nu = nu.log_mass(w);
        let ln_ref = reference.log_mass(w);
        if !ln_nu.is_finite() || !ln_ref.is_finite() {
            return Err(Error::SupportMismatch(format!("zero cylinder mass along the stream at depth {n}")));
        }
        // a full-mass cylinder carries no scale information
        if ln_nu == T::zero() {
            continue;
        }
        kept.push(n);
        ratios.push(ln_ref / ln_nu);
    }
    let liminf = kept
        .iter()
        .zip(&ratios)
        .filter(|(&n, _)| 2 * n >= n_max)
        .map(|(_, &r)| r)
        .fold(T::infinity(), T::min);
    Ok(LocalDimension { depths: kept, ratios, liminf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Bernoulli;
    use crate::symbolic::{Finite, Periodic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_ratio_on_fixed_point() {
        let q = Bernoulli::new(vec![0.3f64, 0.7]).unwrap();
        let p = Bernoulli::new(vec![0.6f64, 0.4]).unwrap();
        let l = local_dimension(&Periodic(vec![1]), &q, &p, &geometric_schedule(1000, 2)).unwrap();
        let expect = 0.6f64.ln() / 0.3f64.ln();
        assert!(l.ratios.iter().all(|r| (r - expect).abs() < 1e-12));
        assert!((l.liminf - expect).abs() < 1e-12);
    }

    #[test]
    fn typical_point_has_ratio_one() {
        let nu = Bernoulli::new(vec![0.2f64, 0.5, 0.3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = crate::measures::MarkovMeasure::from_bernoulli(&nu).sample(&mut rng, 10_000);
        let l = local_dimension(&Finite(x), &nu, &nu, &[10_000]).unwrap();
        assert!((l.ratios[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_shape() {
        let s = geometric_schedule(100, 1);
        assert_eq!(s, vec![1, 2, 4, 8, 16, 32, 64, 100]);
    }
}
