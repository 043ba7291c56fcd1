use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dimension::{relative_entropy_integral, IntegralOptions};
use crate::error::{invalid, Error, Result};
use crate::generic::rng::{derive_seed, stream_rng, tags};
use crate::generic::seed::{level_measures, thresholds, SeedOptions};
use crate::generic::typical::{typical_word, TypicalOptions, WordTest};
use crate::gibbs::GibbsModel;
use crate::measures::MarkovMeasure;
use crate::symbolic::{CylinderMeasure, Digit, DigitSource};

/// The mass-sorting bijection π on the first R digits: π(r) is the digit of
/// rank r (1-based), ties broken by the smaller digit.
#[derive(Clone, Debug)]
pub struct RankTable {
    by_rank: Vec<Digit>,
    rank_of: Vec<u32>,
}

impl RankTable {
    pub fn new<M: CylinderMeasure<f64> + ?Sized>(nu: &M, size: usize) -> Result<Self> {
        if size == 0 || size > u32::MAX as usize {
            return Err(invalid("rank table size must be in 1..2^32"));
        }
        let logs: Vec<f64> = (1..=size as Digit).map(|d| nu.log_mass(&[d])).collect();
        if logs.iter().any(|v| v.is_nan()) {
            return Err(Error::Numeric("NaN 1-cylinder mass".into()));
        }
        let mut by_rank: Vec<Digit> = (1..=size as Digit).collect();
        by_rank.sort_by(|&a, &b| logs[b as usize - 1].partial_cmp(&logs[a as usize - 1]).expect("no NaN"));
        let mut rank_of = vec![0u32; size];
        for (r, &d) in by_rank.iter().enumerate() {
            rank_of[d as usize - 1] = r as u32 + 1;
        }
        Ok(RankTable { by_rank, rank_of })
    }

    pub fn size(&self) -> usize {
        self.by_rank.len()
    }

    pub fn digit(&self, rank: usize) -> Digit {
        self.by_rank[rank - 1]
    }

    pub fn rank(&self, digit: Digit) -> Option<usize> {
        (digit as usize)
            .checked_sub(1)
            .and_then(|i| self.rank_of.get(i))
            .map(|&r| r as usize)
    }
}

/// Parameters of F_z(ε, δ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FzParams {
    pub eps: f64,
    pub delta: f64,
    /// Rank table size R; s_k = min(2^{k²}, R).
    pub ranks: usize,
}

impl FzParams {
    pub fn s(&self, k: u64) -> u64 {
        let sq = k * k;
        if sq >= 63 {
            self.ranks as u64
        } else {
            (1u64 << sq).min(self.ranks as u64)
        }
    }

    /// Ranks r with s_k − s_k^δ < r ≤ s_k, as an inclusive range.
    pub fn interval(&self, k: u64) -> Result<(u64, u64)> {
        let s = self.s(k);
        let lo = ((s as f64) - (s as f64).powf(self.delta)).floor().max(0.0) as u64 + 1;
        if lo > s {
            return Err(invalid(format!("rank interval at level {k} is empty for δ = {}", self.delta)));
        }
        Ok((lo, s))
    }

    /// The bound α(1−ε)δ/(1+ε) on the local dimension of F_z points.
    pub fn lower_bound(&self, alpha: f64) -> f64 {
        alpha * (1.0 - self.eps) * self.delta / (1.0 + self.eps)
    }
}

fn square_root(n: usize) -> Option<u64> {
    let k = (n as f64).sqrt().round() as u64;
    (k * k == n as u64).then_some(k)
}

/// Points of F_z(ε, δ) truncated to a depth, with the Cantor measure λ that is
/// uniform on the rank intervals at square positions.
#[derive(Clone, Debug)]
pub struct FSample {
    pub params: FzParams,
    pub streams: Vec<Vec<Digit>>,
    pub measure: CantorMeasure,
}

/// λ: the digit at position k² uniform over π((s_k − s_k^δ, s_k]), every other
/// digit equal to z. Defined on words up to the stored depth.
#[derive(Clone, Debug)]
pub struct CantorMeasure {
    params: FzParams,
    z: Vec<Digit>,
    table: Arc<RankTable>,
}

impl CantorMeasure {
    pub fn new(params: FzParams, z: Vec<Digit>, table: Arc<RankTable>) -> Result<Self> {
        if table.size() < params.ranks {
            return Err(invalid("rank table smaller than R"));
        }
        let mut k = 1;
        while (k * k) as usize <= z.len() {
            params.interval(k)?;
            k += 1;
        }
        Ok(CantorMeasure { params, z, table })
    }

    pub fn depth(&self) -> usize {
        self.z.len()
    }
}

impl CylinderMeasure<f64> for CantorMeasure {
    fn mass(&self, word: &[Digit]) -> f64 {
        self.log_mass(word).exp()
    }

    fn log_mass(&self, word: &[Digit]) -> f64 {
        if word.len() > self.z.len() {
            return f64::NEG_INFINITY;
        }
        let mut acc = 0.0;
        for (i, &d) in word.iter().enumerate() {
            match square_root(i + 1) {
                Some(k) => {
                    let (lo, hi) = self.params.interval(k).expect("checked at construction");
                    match self.table.rank(d) {
                        Some(r) if (lo..=hi).contains(&(r as u64)) => acc -= ((hi - lo + 1) as f64).ln(),
                        _ => return f64::NEG_INFINITY,
                    }
                }
                None if d != self.z[i] => return f64::NEG_INFINITY,
                None => {}
            }
        }
        acc
    }

    fn support_cap(&self) -> Option<Digit> {
        Some(self.table.size() as Digit)
    }

    fn describe(&self) -> String {
        format!(
            "cantor(eps={}, delta={}, R={}, depth={})",
            self.params.eps,
            self.params.delta,
            self.params.ranks,
            self.z.len()
        )
    }
}

/// Draws `count` points of F_z(ε, δ) up to `depth`. Off the squares the digits
/// are z's; at k² the rank is uniform on the level-k interval.
pub fn sample_f<S, M>(z: &S, nu: &M, params: FzParams, count: usize, depth: usize, seed: u64) -> Result<FSample>
where
    S: DigitSource + ?Sized,
    M: CylinderMeasure<f64> + ?Sized,
{
    if !(params.delta > 0.0 && params.delta <= 1.0) || !(params.eps >= 0.0 && params.eps < 1.0) {
        return Err(invalid("need 0 < δ ≤ 1 and 0 ≤ ε < 1"));
    }
    let zp = z.prefix(depth);
    if zp.len() < depth {
        return Err(Error::StreamExhausted { got: zp.len(), needed: depth });
    }
    let table = Arc::new(RankTable::new(nu, params.ranks)?);
    let measure = CantorMeasure::new(params, zp.clone(), table.clone())?;
    let mut streams = Vec::with_capacity(count);
    for c in 0..count {
        let mut rng = stream_rng(seed, &[tags::CANTOR, c as u64]);
        let mut x = zp.clone();
        let mut k = 1u64;
        while (k * k) as usize <= depth {
            let (lo, hi) = params.interval(k)?;
            let r = rng.gen_range(lo..=hi);
            x[(k * k) as usize - 1] = table.digit(r as usize);
            k += 1;
        }
        streams.push(x);
    }
    Ok(FSample { params, streams, measure })
}

/// μ*: independent blocks, block i of length `lengths[i]` drawn from
/// `measures[i]`; after the listed blocks the last (measure, length) pair repeats.
#[derive(Clone, Debug)]
pub struct ProductBlockMeasure {
    measures: Vec<MarkovMeasure<f64>>,
    lengths: Vec<usize>,
}

impl ProductBlockMeasure {
    pub fn new(measures: Vec<MarkovMeasure<f64>>, lengths: Vec<usize>) -> Result<Self> {
        if measures.is_empty() || measures.len() != lengths.len() || lengths.contains(&0) {
            return Err(invalid("need one positive block length per measure"));
        }
        Ok(ProductBlockMeasure { measures, lengths })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// (start, length, measure index) of the blocks covering the first n digits.
    pub fn blocks(&self, n: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while start < n {
            let idx = i.min(self.lengths.len() - 1);
            out.push((start, self.lengths[idx], idx));
            start += self.lengths[idx];
            i += 1;
        }
        out
    }
}

impl CylinderMeasure<f64> for ProductBlockMeasure {
    fn mass(&self, word: &[Digit]) -> f64 {
        self.log_mass(word).exp()
    }

    fn log_mass(&self, word: &[Digit]) -> f64 {
        self.blocks(word.len())
            .into_iter()
            .map(|(s, l, i)| self.measures[i].log_mass(&word[s..(s + l).min(word.len())]))
            .sum()
    }

    fn support_cap(&self) -> Option<Digit> {
        self.measures.iter().map(|m| m.alphabet() as Digit).max()
    }

    fn describe(&self) -> String {
        format!("product-blocks(lengths={:?})", self.lengths)
    }
}

/// Samples of Y* = Π_j Y_j with the companion measure μ*.
#[derive(Clone, Debug)]
pub struct YStar {
    pub streams: Vec<Vec<Digit>>,
    pub measure: ProductBlockMeasure,
    /// m_1, …, m_{J+1}.
    pub thresholds: Vec<usize>,
    /// h_{μ_j} and h(ν|μ_j) per level.
    pub entropies: Vec<(f64, f64)>,
}

/// Streams of length `length` made of independent typical words: one word of
/// μ_j of length n_j = max(m_{j+1}, N_{j−1}²) for j ≤ J, then words of μ_J of
/// length n_J. Typical words pass the d* check, the Shannon–McMillan–Breiman
/// check |−(1/n) ln μ_j − h_{μ_j}| ≤ ε_j and the Birkhoff check
/// |(1/n) S_n(φ − P̂) + h(ν|μ_j)| ≤ ε_j.
pub fn sample_ystar<M>(mu: &M, model: &GibbsModel<f64>, count: usize, length: usize, opts: &SeedOptions) -> Result<YStar>
where
    M: CylinderMeasure<f64> + ?Sized,
{
    let big_j = opts.levels;
    if big_j == 0 || length == 0 {
        return Err(invalid("Y* needs at least one level and a positive length"));
    }
    let measures = level_measures(mu, big_j + 1, opts)?;
    let k = model.depth() + 1;
    let mut entropies = Vec::with_capacity(measures.len());
    let mut tests = Vec::with_capacity(measures.len());
    for (i, mj) in measures.iter().enumerate() {
        let int = relative_entropy_integral(model, mj, k, &IntegralOptions::default())?;
        if int.infinite {
            return Err(invalid("h(ν|μ) is flagged infinite; Y* needs it finite"));
        }
        let h = mj.entropy();
        let eps = opts.eps(i + 1);
        let arc: Arc<dyn CylinderMeasure<f64>> = Arc::new(mj.clone());
        tests.push(vec![
            WordTest::log_mass(arc, h, eps),
            WordTest::birkhoff(model.potential().clone(), model.pressure(), -int.last, eps),
        ]);
        entropies.push((h, int.last));
    }
    let ms = thresholds(&measures, opts, &tests)?;
    let mut lengths = Vec::with_capacity(big_j);
    let mut total = 0usize;
    for &m in &ms[1..=big_j] {
        let n = m.max(total.saturating_mul(total));
        lengths.push(n);
        total += n;
    }
    let product = ProductBlockMeasure::new(measures[..big_j].to_vec(), lengths)?;
    let mut streams = Vec::with_capacity(count);
    for c in 0..count {
        let mut x = Vec::with_capacity(length);
        for (b, (_, l, i)) in product.blocks(length).into_iter().enumerate() {
            let topts = TypicalOptions {
                budget: opts.budget,
                checkpoint_from: Some(ms[i]),
                depth: None,
            };
            let tag = derive_seed(c as u64, &[tags::YSTAR, b as u64]);
            let w = typical_word(&measures[i], l, opts.eps(i + 1), &tests[i], &topts, opts.seed, tag)?;
            x.extend_from_slice(&w.word);
        }
        x.truncate(length);
        streams.push(x);
    }
    Ok(YStar { streams, measure: product, thresholds: ms, entropies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Bernoulli, InverseSquare};
    use crate::symbolic::{for_each_positive, Periodic};

    #[test]
    fn rank_table_breaks_ties_by_digit() {
        let nu = Bernoulli::new(vec![0.2, 0.4, 0.2, 0.2]).unwrap();
        let t = RankTable::new(&nu, 4).unwrap();
        assert_eq!((1..=4).map(|r| t.digit(r)).collect::<Vec<_>>(), vec![2, 1, 3, 4]);
        assert_eq!(t.rank(3), Some(3));
    }

    #[test]
    fn f_samples_follow_z_and_intervals() {
        let params = FzParams { eps: 0.9, delta: 0.9, ranks: 100_000 };
        let z = Periodic(vec![1, 2]);
        let s = sample_f(&z, &InverseSquare, params, 3, 400, 4).unwrap();
        let zp = z.prefix(400);
        for x in &s.streams {
            for (i, (&a, &b)) in x.iter().zip(&zp).enumerate() {
                match square_root(i + 1) {
                    None => assert_eq!(a, b),
                    Some(k) => {
                        let (lo, hi) = params.interval(k).unwrap();
                        assert!((lo..=hi).contains(&(a as u64)), "rank of {a} at k={k}");
                    }
                }
            }
            assert!(s.measure.log_mass(x).is_finite());
        }
    }

    #[test]
    fn product_measure_is_a_probability() {
        let a = MarkovMeasure::from_bernoulli(&Bernoulli::new(vec![0.3, 0.7]).unwrap());
        let b = MarkovMeasure::<f64>::order_one(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let p = ProductBlockMeasure::new(vec![a, b], vec![2, 3]).unwrap();
        for n in 1..=9 {
            let mut total = 0.0;
            for_each_positive(&p, n, 2, |_, m| total += m).unwrap();
            assert!((total - 1.0).abs() < 1e-10, "n={n}");
        }
    }
}
