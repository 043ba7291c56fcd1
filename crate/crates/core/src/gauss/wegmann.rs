use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gauss::cf::LogContinuant;
use crate::symbolic::Digit;

/// ln |Δ(x_1⋯x_n)| along a point and the consecutive ratios
/// ln|Δ(x_1⋯x_n)| / ln|Δ(x_1⋯x_{n+1})|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegmannTrajectory {
    pub depths: Vec<usize>,
    pub log_lengths: Vec<f64>,
    /// Ratio at each listed depth n (using depth n + 1).
    pub ratios: Vec<f64>,
    pub tol: f64,
    /// First listed depth from which every later ratio stays in (1 − tol, 1 + tol).
    pub settled_from: Option<usize>,
}

impl WegmannTrajectory {
    pub fn converges(&self) -> bool {
        self.settled_from.is_some()
    }

    /// ln|Δ(x_1⋯x_n)| / n^{3/2} at the listed depths.
    pub fn three_halves(&self) -> Vec<f64> {
        self.depths
            .iter()
            .zip(&self.log_lengths)
            .map(|(&n, &l)| l / (n as f64).powf(1.5))
            .collect()
    }
}

/// Scans a point given by ln a_k and reports the ratio at each depth in the
/// schedule. Every depth n needs digit n + 1.
pub fn wegmann_check_log(log_digits: &[f64], depths: &[usize], tol: f64) -> WegmannTrajectory {
    let mut depths: Vec<usize> = depths.iter().copied().filter(|&n| n >= 1 && n < log_digits.len()).collect();
    depths.sort_unstable();
    depths.dedup();
    let mut c = LogContinuant::new();
    let mut logs = Vec::with_capacity(log_digits.len());
    for &l in log_digits {
        c.push_log(l);
        logs.push(c.log_interval_length());
    }
    let log_lengths: Vec<f64> = depths.iter().map(|&n| logs[n - 1]).collect();
    let ratios: Vec<f64> = depths.iter().map(|&n| logs[n - 1] / logs[n]).collect();
    let inside = |r: &f64| (r - 1.0).abs() < tol;
    let settled_from = match ratios.iter().rposition(|r| !inside(r)) {
        None => depths.first().copied(),
        Some(i) if i + 1 < depths.len() => Some(depths[i + 1]),
        Some(_) => None,
    };
    WegmannTrajectory { depths, log_lengths, ratios, tol, settled_from }
}

/// [`wegmann_check_log`] for integer digits.
pub fn wegmann_check(digits: &[Digit], depths: &[usize], tol: f64) -> WegmannTrajectory {
    let logs: Vec<f64> = digits.iter().map(|&d| (d as f64).ln()).collect();
    wegmann_check_log(&logs, depths, tol)
}

/// A point of F = {x : x_{k²} ∈ (a^{k²}, 2a^{k²}], x_k = z_k off the squares},
/// as log-digits: ln x_{k²} = k² ln a + ln(1 + U) with U uniform on (0, 1].
pub fn f_set_log_digits<R: Rng + ?Sized>(z: &[Digit], a: f64, rng: &mut R) -> Vec<f64> {
    let ln_a = a.ln();
    let mut k = 1usize;
    z.iter()
        .enumerate()
        .map(|(i, &d)| {
            if i + 1 == k * k {
                k += 1;
                let u: f64 = 1.0 - rng.gen::<f64>();
                ((k - 1) * (k - 1)) as f64 * ln_a + u.ln_1p()
            } else {
                (d as f64).ln()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::geometric_schedule;

    #[test]
    fn golden_point_ratio_tends_to_one() {
        let t = wegmann_check(&[1; 2001], &geometric_schedule(2000, 4), 0.01);
        assert!(t.converges());
        // ln q_n ≈ n ln φ
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((t.log_lengths.last().unwrap() / 2000.0 + 2.0 * golden.ln()).abs() < 1e-3);
    }

    #[test]
    fn doubly_exponential_digits_never_settle() {
        // ln a_n = 2^n ln 2: each digit outweighs all earlier ones
        let logs: Vec<f64> = (1..=60).map(|n| 2f64.powi(n) * 2f64.ln()).collect();
        let t = wegmann_check_log(&logs, &(1..59).collect::<Vec<_>>(), 0.1);
        assert!(!t.converges());
        assert!(t.ratios.iter().skip(10).all(|r| (r - 0.5).abs() < 0.01));
    }
}
