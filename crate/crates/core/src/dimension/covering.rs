use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{linear_fit, log_sum_exp};
use crate::symbolic::word::{lex_index, word_at};
use crate::symbolic::{CylinderMeasure, Digit};

/// How the admissible words Λ_n are visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveringMode {
    /// All words of Σ_N^{n+j−1}.
    Exhaustive,
    /// This many uniform draws per length, reweighted by N^{n+j−1}.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringParams {
    pub eps: f64,
    pub j: usize,
    pub cap: Digit,
    pub n_max: usize,
    /// γ grid on which growth rates are reported; γ* is refined between grid points.
    pub gammas: Vec<f64>,
    pub mode: CoveringMode,
}

impl CoveringParams {
    pub fn new(eps: f64, j: usize, cap: Digit, n_max: usize) -> Self {
        CoveringParams {
            eps,
            j,
            cap,
            n_max,
            gammas: (0..=60).map(|i| i as f64 * 0.05).collect(),
            mode: CoveringMode::Exhaustive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringDiagnostic {
    /// Where the growth rate of ln Σ_{Λ_n} ν([ω])^γ in n changes sign.
    pub gamma_star: f64,
    /// False when the rate keeps one sign over the whole grid; γ* is then the grid end.
    pub bracketed: bool,
    pub gammas: Vec<f64>,
    pub rates: Vec<f64>,
    /// Lengths n with Λ_n nonempty.
    pub lengths: Vec<usize>,
    /// Number (or estimated number) of admissible words per length.
    pub admitted: Vec<f64>,
}

/// Admitted log-masses ln ν([ω]) with multiplicities, quantized so that equal
/// masses share a bin.
type Histogram = BTreeMap<i64, f64>;

const QUANTUM: f64 = 1e-10;

struct Filter {
    j: usize,
    cap: Digit,
    eps: f64,
    targets: Vec<f64>,
}

impl Filter {
    /// Frequencies of every j-word among the n windows all within ε of μ.
    fn admits(&self, counts: &[u32], n: usize) -> bool {
        counts
            .iter()
            .zip(&self.targets)
            .all(|(&c, &t)| (c as f64 / n as f64 - t).abs() <= self.eps)
    }

    /// Counts only grow, so an overshoot cannot be repaired.
    fn hopeless(&self, counts: &[u32], n: usize) -> bool {
        counts
            .iter()
            .zip(&self.targets)
            .any(|(&c, &t)| c as f64 / n as f64 > t + self.eps)
    }
}

fn add(h: &mut Histogram, log_mass: f64, weight: f64) {
    let key = (log_mass / QUANTUM).round() as i64;
    *h.entry(key).or_insert(0.0) += weight;
}

fn exhaustive<N: CylinderMeasure<f64> + ?Sized>(nu: &N, filter: &Filter, n: usize) -> Histogram {
    let len = n + filter.j - 1;
    let cap = filter.cap;
    let mut hist = Histogram::new();
    let mut word: Vec<Digit> = Vec::with_capacity(len);
    let mut counts = vec![0u32; filter.targets.len()];
    let mut ext: Vec<Vec<f64>> = vec![Vec::new(); len];
    // iterative DFS; ext[l] holds ν of the children of word[..l]
    let mut next: Vec<Digit> = vec![1; len];
    let mut level = 0usize;
    nu.extension_masses(&word, cap, &mut ext[0]);
    loop {
        if next[level] > cap {
            if level == 0 {
                break;
            }
            level -= 1;
            if word.len() >= filter.j {
                counts[lex_index(&word[word.len() - filter.j..], cap)] -= 1;
            }
            word.pop();
            next[level] += 1;
            continue;
        }
        let a = next[level];
        let m = ext[level][(a - 1) as usize];
        word.push(a);
        // linear masses can underflow on long words
        let lm = if m >= f64::MIN_POSITIVE { m.ln() } else { nu.log_mass(&word) };
        word.pop();
        if lm == f64::NEG_INFINITY {
            next[level] += 1;
            continue;
        }
        word.push(a);
        let windows = (word.len() + 1).saturating_sub(filter.j);
        if word.len() >= filter.j {
            let idx = lex_index(&word[word.len() - filter.j..], cap);
            counts[idx] += 1;
        }
        let done = word.len() == len;
        let prune = windows > 0 && filter.hopeless(&counts, n);
        if done && !prune && filter.admits(&counts, n) {
            add(&mut hist, lm, 1.0);
        }
        if done || prune {
            if word.len() >= filter.j {
                let idx = lex_index(&word[word.len() - filter.j..], cap);
                counts[idx] -= 1;
            }
            word.pop();
            next[level] += 1;
            continue;
        }
        let mut buf = std::mem::take(&mut ext[level + 1]);
        nu.extension_masses(&word, cap, &mut buf);
        ext[level + 1] = buf;
        level += 1;
        next[level] = 1;
    }
    hist
}

fn sampled<N: CylinderMeasure<f64> + ?Sized, G: Rng + ?Sized>(
    nu: &N,
    filter: &Filter,
    n: usize,
    draws: usize,
    rng: &mut G,
) -> Histogram {
    let len = n + filter.j - 1;
    let cap = filter.cap;
    let weight = (cap as f64).powi(len as i32) / draws as f64;
    let mut hist = Histogram::new();
    let mut word = vec![1 as Digit; len];
    let mut counts = vec![0u32; filter.targets.len()];
    for _ in 0..draws {
        for d in word.iter_mut() {
            *d = rng.gen_range(1..=cap);
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for w in word.windows(filter.j) {
            counts[lex_index(w, cap)] += 1;
        }
        if filter.admits(&counts, n) {
            let lm = nu.log_mass(&word);
            if lm.is_finite() {
                add(&mut hist, lm, weight);
            }
        }
    }
    hist
}

fn log_sum(hist: &Histogram, gamma: f64) -> f64 {
    let terms: Vec<f64> = hist
        .iter()
        .map(|(&k, &w)| w.ln() + gamma * k as f64 * QUANTUM)
        .collect();
    log_sum_exp(&terms)
}

fn growth(hists: &[(usize, Histogram)], gamma: f64) -> f64 {
    let xs: Vec<f64> = hists.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = hists.iter().map(|(_, h)| log_sum(h, gamma)).collect();
    linear_fit(&xs, &ys).0
}

/// Upper-bound diagnostic for dim_ν of the set of points whose Σ_N^j-word
/// frequencies stay within ε of μ.
///
/// For each n ≤ n_max, Λ_n holds the words of length n + j − 1 over {1..N} whose
/// n windows of length j have frequencies within ε of μ([u]) for all u ∈ Σ_N^j.
/// The growth rate in n of ln Σ_{ω∈Λ_n} ν([ω])^γ is the least-squares slope over
/// all n with Λ_n nonempty; γ* is its zero.
pub fn covering_sum_diagnostic<M, N, G>(mu: &M, nu: &N, params: &CoveringParams, rng: &mut G) -> Result<CoveringDiagnostic>
where
    M: CylinderMeasure<f64> + ?Sized,
    N: CylinderMeasure<f64> + ?Sized,
    G: Rng + ?Sized,
{
    let CoveringParams { eps, j, cap, n_max, .. } = *params;
    if j == 0 || cap == 0 || n_max == 0 || !(eps > 0.0) {
        return Err(invalid("covering diagnostic needs j, N, n_max and ε positive"));
    }
    if params.gammas.len() < 2 || params.gammas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("γ grid must be increasing with at least two points"));
    }
    if params.mode == CoveringMode::Exhaustive && (cap as f64).powi((n_max + j - 1) as i32) > 1e8 {
        return Err(invalid(format!(
            "exhaustive enumeration of {cap}^{} words is too large; use sampling",
            n_max + j - 1
        )));
    }
    let mut targets = Vec::new();
    let mut buf = Vec::new();
    for idx in 0..(cap as usize).pow(j as u32) {
        word_at(idx, j, cap, &mut buf);
        targets.push(mu.mass(&buf));
    }
    let filter = Filter { j, cap, eps, targets };
    let mut hists = Vec::new();
    for n in 1..=n_max {
        let h = match params.mode {
            CoveringMode::Exhaustive => exhaustive(nu, &filter, n),
            CoveringMode::Sampled(draws) => sampled(nu, &filter, n, draws.max(1), rng),
        };
        if !h.is_empty() {
            hists.push((n, h));
        }
    }
    if hists.len() < 2 {
        return Err(invalid(format!(
            "Λ_n is empty for all but {} lengths n ≤ {n_max}; ε = {eps} is too small",
            hists.len()
        )));
    }
    let rates: Vec<f64> = params.gammas.iter().map(|&g| growth(&hists, g)).collect();
    let mut gamma_star = *params.gammas.last().expect("nonempty");
    let mut bracketed = false;
    if rates[0] <= 0.0 {
        gamma_star = params.gammas[0];
        bracketed = rates[0] == 0.0;
    } else if let Some(i) = rates.windows(2).position(|r| r[0] > 0.0 && r[1] <= 0.0) {
        let (mut lo, mut hi) = (params.gammas[i], params.gammas[i + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if growth(&hists, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        gamma_star = 0.5 * (lo + hi);
        bracketed = true;
    }
    let admitted = hists.iter().map(|(_, h)| h.values().sum()).collect();
    Ok(CoveringDiagnostic {
        gamma_star,
        bracketed,
        gammas: params.gammas.clone(),
        rates,
        lengths: hists.iter().map(|(n, _)| *n).collect(),
        admitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Bernoulli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(p: [f64; 2], q: [f64; 2], eps: f64) -> CoveringDiagnostic {
        let mu = Bernoulli::new(p.to_vec()).unwrap();
        let nu = Bernoulli::new(q.to_vec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        covering_sum_diagnostic(&mu, &nu, &CoveringParams::new(eps, 1, 2, 16), &mut rng).unwrap()
    }

    #[test]
    fn admitted_counts_match_binomials() {
        let d = run([0.5, 0.5], [0.5, 0.5], 0.05);
        // n = 2: only "12" and "21"
        let i = d.lengths.iter().position(|&n| n == 2).unwrap();
        assert_eq!(d.admitted[i], 2.0);
        assert!(!d.lengths.contains(&1));
    }

    #[test]
    fn fair_coin_and_vacuous_constraint() {
        assert!((run([0.5, 0.5], [0.5, 0.5], 0.05).gamma_star - 1.0).abs() < 0.1);
        let d = run([0.5, 0.5], [0.5, 0.5], 2.0);
        assert!((d.gamma_star - 1.0).abs() < 1e-6);
    }

    #[test]
    fn biased_frequencies() {
        let d = run([0.9, 0.1], [0.5, 0.5], 0.05);
        let be = (-(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln())) / 2f64.ln();
        assert!((d.gamma_star - be).abs() < 0.1, "{}", d.gamma_star);
    }

    #[test]
    fn sampling_tracks_enumeration() {
        let mu = Bernoulli::new(vec![0.5, 0.5]).unwrap();
        let mut params = CoveringParams::new(0.2, 2, 2, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let exact = covering_sum_diagnostic(&mu, &mu, &params, &mut rng).unwrap();
        params.mode = CoveringMode::Sampled(20_000);
        let est = covering_sum_diagnostic(&mu, &mu, &params, &mut rng).unwrap();
        assert!((exact.gamma_star - est.gamma_star).abs() < 0.05);
    }
}
