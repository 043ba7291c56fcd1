use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generic::rng::{stream_rng, tags};
use crate::gibbs::Potential;
use crate::measures::MarkovMeasure;
use crate::symbolic::{d_star_orbit, CylinderMeasure, Digit, OrbitAccumulator};

/// A scalar statistic of a finished word that must land within `tol` of `target`.
#[derive(Clone)]
pub struct WordTest {
    pub label: String,
    pub statistic: Arc<dyn Fn(&[Digit]) -> f64 + Send + Sync>,
    pub target: f64,
    pub tol: f64,
}

impl std::fmt::Debug for WordTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WordTest({}, target {}, tol {})", self.label, self.target, self.tol)
    }
}

impl WordTest {
    /// (1/n) S_n(φ − shift) along the word.
    pub fn birkhoff(phi: Arc<dyn Potential<f64>>, shift: f64, target: f64, tol: f64) -> Self {
        WordTest {
            label: format!("birkhoff({})", phi.id()),
            statistic: Arc::new(move |w: &[Digit]| phi.birkhoff_value(w) / w.len() as f64 - shift),
            target,
            tol,
        }
    }

    /// −(1/n) ln μ([w]).
    pub fn log_mass(mu: Arc<dyn CylinderMeasure<f64>>, target: f64, tol: f64) -> Self {
        WordTest {
            label: format!("log-mass({})", mu.describe()),
            statistic: Arc::new(move |w: &[Digit]| -mu.log_mass(w) / w.len() as f64),
            target,
            tol,
        }
    }

    /// |statistic − target| − tol; nonpositive means pass.
    pub fn deficit(&self, word: &[Digit]) -> f64 {
        let v = (self.statistic)(word);
        if v.is_finite() {
            (v - self.target).abs() - self.tol
        } else {
            f64::INFINITY
        }
    }
}

/// Truncation depth for d* checks at tolerance ε: the depth tail 2^(−d) is at
/// most ε/4, limited so the accumulator stays small.
pub fn check_depth(eps: f64, cap: Digit) -> usize {
    let want = (4.0 / eps).log2().ceil().max(2.0) as usize;
    let mut d = 1;
    let mut cells = cap as f64;
    while d < want && cells * cap as f64 <= (1u64 << 22) as f64 {
        d += 1;
        cells *= cap as f64;
    }
    d
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalOptions {
    /// Sampling attempts before giving up.
    pub budget: usize,
    /// The d* bound must also hold on every dyadic prefix at least this long.
    pub checkpoint_from: Option<usize>,
    /// d* truncation depth; chosen from ε when absent.
    pub depth: Option<usize>,
}

impl Default for TypicalOptions {
    fn default() -> Self {
        TypicalOptions { budget: 200, checkpoint_from: None, depth: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalWord {
    pub word: Vec<Digit>,
    /// Largest truncated d*(Δ, μ_j) over the checked prefixes.
    pub distance: f64,
    /// Largest deficit over all checks; nonpositive for an accepted word.
    pub deficit: f64,
    /// Attempts used, including the accepted one.
    pub trials: usize,
}

fn checkpoints(n: usize, from: Option<usize>) -> Vec<usize> {
    let mut out = Vec::new();
    if let Some(m) = from {
        let mut p = m.max(1).next_power_of_two();
        while p < n {
            if p >= m {
                out.push(p);
            }
            p *= 2;
        }
    }
    out.push(n);
    out
}

/// Worst d* over the checkpoints and worst deficit over all checks.
fn assess(
    mu: &MarkovMeasure<f64>,
    word: &[Digit],
    eps: f64,
    tests: &[WordTest],
    marks: &[usize],
    depth: usize,
) -> Result<(f64, f64)> {
    let cap = mu.alphabet() as Digit;
    let mut acc = OrbitAccumulator::new(depth, cap)?;
    let mut dist = 0.0f64;
    let mut start = 0;
    for &m in marks {
        acc.extend(word[start..m].iter().copied());
        start = m;
        let d = d_star_orbit::<f64, _>(&acc, mu, depth, cap)?;
        dist = dist.max(d.value);
    }
    let mut deficit = dist - eps;
    for t in tests {
        deficit = deficit.max(t.deficit(word));
    }
    Ok((dist, deficit))
}

/// Samples words of length n from μ_j until one has truncated d*(Δ, μ_j) ≤ ε on
/// the checked prefixes and passes every test. Trial i draws from the stream
/// (seed, TYPICAL, tag, i), so the accepted word is the lowest passing index.
pub fn typical_word(
    mu: &MarkovMeasure<f64>,
    n: usize,
    eps: f64,
    tests: &[WordTest],
    opts: &TypicalOptions,
    seed: u64,
    tag: u64,
) -> Result<TypicalWord> {
    if n == 0 || opts.budget == 0 || !(eps > 0.0) {
        return Err(invalid("typical word needs n, budget and ε positive"));
    }
    let depth = opts.depth.unwrap_or_else(|| check_depth(eps, mu.alphabet() as Digit));
    let marks = checkpoints(n, opts.checkpoint_from);
    let mut best: Option<(Vec<Digit>, f64)> = None;
    for trial in 0..opts.budget {
        let mut rng = stream_rng(seed, &[tags::TYPICAL, tag, trial as u64]);
        let word = mu.sample(&mut rng, n);
        let (distance, deficit) = assess(mu, &word, eps, tests, &marks, depth)?;
        if deficit <= 0.0 {
            return Ok(TypicalWord { word, distance, deficit, trials: trial + 1 });
        }
        if best.as_ref().is_none_or(|(_, d)| deficit < *d) {
            best = Some((word, deficit));
        }
    }
    let (best, best_deficit) = best.expect("budget >= 1");
    Err(Error::BudgetExhausted { trials: opts.budget, best_deficit, best })
}

/// Smallest n on the doubling grid from `start` at which more than half of
/// `trials` independent μ_j-words pass the same checks as [`typical_word`]
/// (without prefix checkpoints). Stands in for the Egoroff threshold m_j.
pub fn threshold_length(
    mu: &MarkovMeasure<f64>,
    eps: f64,
    tests: &[WordTest],
    start: usize,
    max: usize,
    trials: usize,
    seed: u64,
    tag: u64,
) -> Result<usize> {
    let depth = check_depth(eps, mu.alphabet() as Digit);
    let mut n = start.max(1);
    while n <= max {
        let mut pass = 0;
        for t in 0..trials {
            let mut rng = stream_rng(seed, &[tags::THRESHOLD, tag, n as u64, t as u64]);
            let word = mu.sample(&mut rng, n);
            let (_, deficit) = assess(mu, &word, eps, tests, &[n], depth)?;
            if deficit <= 0.0 {
                pass += 1;
            }
        }
        if 2 * pass > trials {
            return Ok(n);
        }
        n *= 2;
    }
    Err(Error::Numeric(format!("no length up to {max} reaches acceptance 1/2 at ε = {eps}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::LocallyConstant;
    use crate::measures::Bernoulli;

    #[test]
    fn fair_coin_word() {
        let mu = MarkovMeasure::from_bernoulli(&Bernoulli::new(vec![0.5, 0.5]).unwrap());
        let t = typical_word(&mu, 10_000, 0.02, &[], &TypicalOptions::default(), 1, 0).unwrap();
        let ones = t.word.iter().filter(|&&d| d == 1).count() as f64 / 1e4;
        assert!((ones - 0.5).abs() < 0.01);
        assert!(t.distance <= 0.02);
    }

    #[test]
    fn deterministic_cycle() {
        let mu = MarkovMeasure::<f64>::periodic(&[1, 2]).unwrap();
        let t = typical_word(&mu, 1000, 0.01, &[], &TypicalOptions::default(), 5, 0).unwrap();
        assert!(t.word.windows(2).all(|w| w[0] != w[1]));
        assert!(t.distance < 1e-2);
    }

    #[test]
    fn birkhoff_test_is_enforced() {
        let q = [0.3, 0.7];
        let r = [0.6, 0.4];
        let mu = MarkovMeasure::from_bernoulli(&Bernoulli::new(r.to_vec()).unwrap());
        let phi: Arc<dyn Potential<f64>> = Arc::new(LocallyConstant::log_weights(&q).unwrap());
        let target = r[0] * q[0].ln() + r[1] * q[1].ln();
        let test = WordTest::birkhoff(phi.clone(), 0.0, target, 0.01);
        let t = typical_word(&mu, 5000, 0.05, &[test], &TypicalOptions::default(), 2, 0).unwrap();
        let avg = phi.birkhoff_value(&t.word) / 5000.0;
        assert!((avg - target).abs() < 0.01);
    }

    #[test]
    fn budget_exhaustion_reports_best() {
        let mu = MarkovMeasure::from_bernoulli(&Bernoulli::new(vec![0.5, 0.5]).unwrap());
        let opts = TypicalOptions { budget: 3, ..Default::default() };
        match typical_word(&mu, 10, 1e-6, &[], &opts, 0, 0) {
            Err(Error::BudgetExhausted { trials, best, .. }) => {
                assert_eq!(trials, 3);
                assert_eq!(best.len(), 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn threshold_grows_as_tolerance_shrinks() {
        let mu = MarkovMeasure::<f64>::order_one(&[vec![0.6, 0.4], vec![0.3, 0.7]]).unwrap();
        let a = threshold_length(&mu, 0.0625, &[], 64, 1 << 20, 20, 3, 1).unwrap();
        let b = threshold_length(&mu, 0.0625 / 4.0, &[], 64, 1 << 20, 20, 3, 2).unwrap();
        assert!(b > a, "{a} {b}");
    }
}
