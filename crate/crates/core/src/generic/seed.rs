use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generic::rng::derive_seed;
use crate::generic::typical::{threshold_length, typical_word, TypicalOptions};
use crate::measures::{markov_approximation, MarkovMeasure};
use crate::symbolic::{CylinderMeasure, Digit, DigitSource};

/// A nondecreasing unbounded digit-cap sequence a_n, n ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Caps {
    /// No constraint.
    Unbounded,
    /// a_n = n.
    Identity,
    /// a_n = ⌊n^p⌋.
    Power { exponent: f64 },
    /// a_n = ⌊log₂ n⌋ + 1.
    Log2,
}

impl Caps {
    pub fn at(&self, n: u128) -> u128 {
        match *self {
            Caps::Unbounded => u128::MAX,
            Caps::Identity => n,
            Caps::Power { exponent } => {
                let v = (n as f64).powf(exponent).floor();
                if v >= u128::MAX as f64 {
                    u128::MAX
                } else {
                    v as u128
                }
            }
            Caps::Log2 => (u128::BITS - n.max(1).leading_zeros()) as u128,
        }
    }

    /// Smallest n ≥ 1 with a_n ≥ s, if representable.
    pub fn first_reaching(&self, s: u128) -> Option<u128> {
        if self.at(1) >= s {
            return Some(1);
        }
        let mut hi: u128 = 2;
        while self.at(hi) < s {
            hi = hi.checked_mul(2)?;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.at(mid) >= s {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// `none`, `n`, `log2` or `pow:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Caps::Unbounded),
            "n" | "identity" => Ok(Caps::Identity),
            "log2" => Ok(Caps::Log2),
            other => {
                let p = other
                    .strip_prefix("pow:")
                    .ok_or_else(|| Error::Parse(format!("unknown cap sequence '{other}'")))?;
                let exponent: f64 = p.parse().map_err(|_| Error::Parse(format!("bad exponent '{p}'")))?;
                if !(exponent > 0.0) || !exponent.is_finite() {
                    return Err(Error::Parse("cap exponent must be positive".into()));
                }
                Ok(Caps::Power { exponent })
            }
        }
    }
}

impl std::fmt::Display for Caps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Caps::Unbounded => write!(f, "none"),
            Caps::Identity => write!(f, "n"),
            Caps::Power { exponent } => write!(f, "pow:{exponent}"),
            Caps::Log2 => write!(f, "log2"),
        }
    }
}

/// One level W_j = x̃_j^{t_j} of the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedLevel {
    pub j: usize,
    pub eps: f64,
    /// Alphabet of μ_j.
    pub alphabet: Digit,
    /// Threshold m_j.
    pub m: usize,
    /// The typical word x̃_j, of length n_j.
    pub word: Vec<Digit>,
    /// Repetitions t_j; `None` on the last level, which never ends.
    pub reps: Option<u128>,
    pub max_digit: Digit,
    pub distance: f64,
}

/// Lengths and tolerances of a seed; N_j = Σ_{i≤j} t_i n_i excludes the padding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSchedule {
    /// Leading 1s placed before W_1 so that its digits respect the caps.
    pub padding: u128,
    pub levels: Vec<SeedLevel>,
    /// m_1, …, m_{J+1}.
    pub thresholds: Vec<usize>,
}

impl SeedSchedule {
    /// N_1, …, N_{J−1}; the last level has no end.
    pub fn cumulative(&self) -> Vec<u128> {
        let mut out = Vec::new();
        let mut acc: u128 = 0;
        for l in &self.levels {
            if let Some(t) = l.reps {
                acc = acc.saturating_add(t.saturating_mul(l.word.len() as u128));
                out.push(acc);
            }
        }
        out
    }

    /// Checks the schedule invariants and cap compliance level by level.
    pub fn check(&self, caps: &Caps) -> Result<()> {
        let ns = self.cumulative();
        for w in ns.windows(2) {
            if w[1] <= w[0] || w[1] < w[0].saturating_mul(w[0]) {
                return Err(invalid(format!("N_j sequence {:?} violates N_(j+1) ≥ max(N_j², N_j + 1)", ns)));
            }
        }
        for w in self.levels.windows(2) {
            if !(w[1].eps < w[0].eps) {
                return Err(invalid("tolerances must strictly decrease"));
            }
        }
        let mut start = self.padding;
        for (i, l) in self.levels.iter().enumerate() {
            let cap = caps.at(start + 1);
            if (l.max_digit as u128) > cap {
                return Err(Error::CapMismatch(format!(
                    "level {} starts at index {} with digit {} above cap {cap}",
                    l.j,
                    start + 1,
                    l.max_digit
                )));
            }
            if let Some(&n) = ns.get(i) {
                start = self.padding + n;
            }
        }
        Ok(())
    }
}

/// The seed z = 1^p W_1 W_2 ⋯ W_{J−1} followed by independent typical words of
/// μ_J of length n_J, the first of which is x̃_J.
///
/// The later μ_J words are drawn on demand from (seed, TYPICAL, J, index), so
/// replays agree. A point restored from JSON has no sampler and cycles x̃_J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericPoint {
    pub schedule: SeedSchedule,
    pub caps: Caps,
    pub seed: u64,
    pub measure: String,
    #[serde(skip)]
    tail: Option<TailSampler>,
}

#[derive(Clone, Debug, PartialEq)]
struct TailSampler {
    measure: MarkovMeasure<f64>,
    budget: usize,
}

impl TailSampler {
    fn word(&self, level: &SeedLevel, seed: u64, index: u128) -> Vec<Digit> {
        let opts = TypicalOptions { budget: self.budget, checkpoint_from: None, depth: None };
        let tag = derive_seed(level.j as u64, &[index as u64]);
        match typical_word(&self.measure, level.word.len(), level.eps, &[], &opts, seed, tag) {
            Ok(t) => t.word,
            Err(Error::BudgetExhausted { best, .. }) => best,
            Err(_) => level.word.clone(),
        }
    }
}

struct SeedIter<'a> {
    point: &'a GenericPoint,
    pad_left: u128,
    level: usize,
    pos: usize,
    reps_done: u128,
    fresh: Option<Vec<Digit>>,
}

impl Iterator for SeedIter<'_> {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        if self.pad_left > 0 {
            self.pad_left -= 1;
            return Some(1);
        }
        let levels = &self.point.schedule.levels;
        loop {
            let l = levels.get(self.level)?;
            let word = self.fresh.as_deref().unwrap_or(&l.word);
            if self.pos < word.len() {
                self.pos += 1;
                return Some(word[self.pos - 1]);
            }
            self.pos = 0;
            self.reps_done += 1;
            match l.reps {
                Some(t) if self.reps_done >= t => {
                    self.level += 1;
                    self.reps_done = 0;
                }
                Some(_) => {}
                None => {
                    self.fresh = self.point.tail.as_ref().map(|s| s.word(l, self.point.seed, self.reps_done));
                }
            }
        }
    }
}

impl DigitSource for GenericPoint {
    fn digits(&self) -> Box<dyn Iterator<Item = Digit> + '_> {
        Box::new(SeedIter {
            point: self,
            pad_left: self.schedule.padding,
            level: 0,
            pos: 0,
            reps_done: 0,
            fresh: None,
        })
    }
}

impl GenericPoint {
    /// Provenance lines, each starting with `#`.
    pub fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# measure {}", self.measure);
        let _ = writeln!(s, "# seed {}", self.seed);
        let _ = writeln!(s, "# caps {}", self.caps);
        let _ = writeln!(s, "# padding {}", self.schedule.padding);
        let _ = writeln!(s, "# thresholds {:?}", self.schedule.thresholds);
        for l in &self.schedule.levels {
            let reps = l.reps.map_or_else(|| "open".to_string(), |t| t.to_string());
            let _ = writeln!(
                s,
                "# level {} eps {:e} alphabet {} m {} n {} reps {} max_digit {} d* {:.6e}",
                l.j,
                l.eps,
                l.alphabet,
                l.m,
                l.word.len(),
                reps,
                l.max_digit,
                l.distance
            );
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOptions {
    /// Number of levels J.
    pub levels: usize,
    /// ε_j = scale · 4^(−j).
    pub scale: f64,
    /// Trials per length in the threshold search.
    pub trials: usize,
    pub m_start: usize,
    pub m_max: usize,
    /// Attempts per typical word.
    pub budget: usize,
    /// Alphabet cap for μ_j; taken from μ's support, else 8·2^j, when absent.
    pub level_caps: Option<Vec<Digit>>,
    pub seed: u64,
}

impl Default for SeedOptions {
    fn default() -> Self {
        SeedOptions {
            levels: 3,
            scale: 1.0,
            trials: 20,
            m_start: 64,
            m_max: 1 << 22,
            budget: 200,
            level_caps: None,
            seed: 0,
        }
    }
}

impl SeedOptions {
    pub fn eps(&self, j: usize) -> f64 {
        self.scale * 4f64.powi(-(j as i32))
    }

    pub fn level_cap<M: CylinderMeasure<f64> + ?Sized>(&self, mu: &M, j: usize) -> Digit {
        if let Some(c) = self.level_caps.as_ref().and_then(|v| v.get(j - 1).or(v.last())) {
            return *c;
        }
        mu.support_cap().unwrap_or_else(|| 8u32.saturating_mul(1 << j.min(20)))
    }
}

/// Markov approximations μ_1, …, μ_J on the level caps.
pub fn level_measures<M: CylinderMeasure<f64> + ?Sized>(mu: &M, count: usize, opts: &SeedOptions) -> Result<Vec<MarkovMeasure<f64>>> {
    (1..=count).map(|j| markov_approximation(mu, j, opts.level_cap(mu, j))).collect()
}

/// Thresholds m_1 ≤ … ≤ m_count for the given measures and tolerances.
pub(crate) fn thresholds(measures: &[MarkovMeasure<f64>], opts: &SeedOptions, tests: &[Vec<crate::generic::WordTest>]) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::with_capacity(measures.len());
    for (i, mj) in measures.iter().enumerate() {
        let start = out.last().copied().unwrap_or(opts.m_start).max(opts.m_start);
        let t = tests.get(i).map(|v| v.as_slice()).unwrap_or(&[]);
        out.push(threshold_length(mj, opts.eps(i + 1), t, start, opts.m_max, opts.trials, opts.seed, i as u64 + 1)?);
    }
    Ok(out)
}

/// Builds a μ-generic point whose digits respect the caps.
///
/// Level j uses a typical word x̃_j of μ_j of length n_j = m_{j+1}, repeated t_j
/// times so that N_j ≥ max{N_{j−1}², first index where a_n reaches the next
/// level's largest digit}. A run of 1s pads the front until the caps admit the
/// digits of x̃_1.
pub fn build_seed<M: CylinderMeasure<f64> + ?Sized>(mu: &M, caps: Caps, opts: &SeedOptions) -> Result<GenericPoint> {
    let big_j = opts.levels;
    if big_j == 0 || !(opts.scale > 0.0) {
        return Err(invalid("seed needs at least one level and a positive scale"));
    }
    let measures = level_measures(mu, big_j + 1, opts)?;
    let ms = thresholds(&measures, opts, &[])?;
    let mut words = Vec::with_capacity(big_j);
    for j in 1..=big_j {
        let topts = TypicalOptions {
            budget: opts.budget,
            checkpoint_from: Some(ms[j - 1]),
            depth: None,
        };
        let t = typical_word(&measures[j - 1], ms[j], opts.eps(j), &[], &topts, opts.seed, j as u64)?;
        words.push(t);
    }
    let max_digit = |w: &[Digit]| w.iter().copied().max().unwrap_or(1);
    let reach = |s: Digit, at: usize| {
        caps.first_reaching(s as u128).ok_or_else(|| {
            Error::CapMismatch(format!("caps never reach digit {s} needed by level {at}"))
        })
    };
    let padding = reach(max_digit(&words[0].word), 1)? - 1;
    let mut levels: Vec<SeedLevel> = words
        .into_iter()
        .enumerate()
        .map(|(i, t)| SeedLevel {
            j: i + 1,
            eps: opts.eps(i + 1),
            alphabet: measures[i].alphabet() as Digit,
            m: ms[i],
            max_digit: max_digit(&t.word),
            word: t.word,
            reps: None,
            distance: t.distance,
        })
        .collect();
    let mut total: u128 = 0;
    for i in 0..big_j.saturating_sub(1) {
        let n = levels[i].word.len() as u128;
        let need_cap = reach(levels[i + 1].max_digit, i + 2)?;
        let target = total
            .checked_mul(total)
            .ok_or_else(|| Error::Numeric("N_j² overflows".into()))?
            .max(need_cap.saturating_sub(padding + 1))
            .max(total + 1);
        let reps = (target - total).div_ceil(n).max(1);
        total += reps * n;
        levels[i].reps = Some(reps);
    }
    let point = GenericPoint {
        schedule: SeedSchedule { padding, levels, thresholds: ms },
        caps,
        seed: opts.seed,
        measure: mu.describe(),
        tail: Some(TailSampler { measure: measures[big_j - 1].clone(), budget: opts.budget }),
    };
    point.schedule.check(&caps)?;
    Ok(point)
}

/// Digits as text, one per line, under the provenance header.
pub fn export_stream<S: DigitSource + ?Sized>(header: &str, x: &S, n: usize) -> String {
    let mut s = String::with_capacity(header.len() + 3 * n);
    s.push_str(header);
    for d in x.digits().take(n) {
        let _ = writeln!(s, "{d}");
    }
    s
}

/// Parses [`export_stream`] output, skipping `#` lines.
pub fn import_stream(text: &str) -> Result<Vec<Digit>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<Digit>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::Parse(format!("bad digit line '{l}'")))
        })
        .collect()
}

/// First index n ≤ limit with z_n > a_n.
pub fn first_cap_violation<S: DigitSource + ?Sized>(x: &S, caps: &Caps, limit: usize) -> Option<(usize, Digit)> {
    x.digits()
        .take(limit)
        .enumerate()
        .find(|&(i, d)| d as u128 > caps.at(i as u128 + 1))
        .map(|(i, d)| (i + 1, d))
}
