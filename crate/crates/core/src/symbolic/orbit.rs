use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbolic::cylinder::CylinderMeasure;
use crate::symbolic::word::{format_digits, parse_digits, word_at, Digit};

const MAX_CELLS: usize = 1 << 27;

/// Window counts of a digit stream: τ_u for every u ∈ Σ_N^k, k ≤ k_max, over the
/// windows lying inside the digits pushed so far.
///
/// Windows containing a letter above N are counted as overflow, so for each k
/// `Σ τ_u + overflow_k = windows_k` (= n − k + 1 for a single stream).
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitAccumulator {
    n: u64,
    k_max: usize,
    cap: Digit,
    counts: Vec<Vec<u64>>,
    windows: Vec<u64>,
    overflow: Vec<u64>,
    max_digit: Digit,
    code: usize,
    run: usize,
    modulus: Vec<usize>,
}

impl OrbitAccumulator {
    pub fn new(k_max: usize, cap: Digit) -> Result<Self> {
        if k_max == 0 || cap == 0 {
            return Err(Error::InvalidInput("k_max and N must be positive".into()));
        }
        let mut modulus = Vec::with_capacity(k_max + 1);
        let mut size = 1usize;
        modulus.push(1);
        let mut total = 0usize;
        for _ in 0..k_max {
            size = size
                .checked_mul(cap as usize)
                .filter(|s| *s <= MAX_CELLS)
                .ok_or_else(|| Error::InvalidInput(format!("N^k_max too large (N={cap}, k_max={k_max})")))?;
            total += size;
            modulus.push(size);
        }
        if total > MAX_CELLS {
            return Err(Error::InvalidInput(format!("accumulator needs {total} cells")));
        }
        Ok(OrbitAccumulator {
            n: 0,
            k_max,
            cap,
            counts: (1..=k_max).map(|k| vec![0; modulus[k]]).collect(),
            windows: vec![0; k_max],
            overflow: vec![0; k_max],
            max_digit: 0,
            code: 0,
            run: 0,
            modulus,
        })
    }

    /// Appends one digit of the stream.
    pub fn push(&mut self, d: Digit) {
        self.n += 1;
        self.max_digit = self.max_digit.max(d);
        if d >= 1 && d <= self.cap {
            self.code = (self.code * self.cap as usize + (d - 1) as usize) % self.modulus[self.k_max];
            self.run += 1;
        } else {
            self.code = 0;
            self.run = 0;
        }
        let avail = self.n.min(self.k_max as u64) as usize;
        for k in 1..=avail {
            self.windows[k - 1] += 1;
            if self.run >= k {
                self.counts[k - 1][self.code % self.modulus[k]] += 1;
            } else {
                self.overflow[k - 1] += 1;
            }
        }
    }

    pub fn extend<I: IntoIterator<Item = Digit>>(&mut self, digits: I) {
        for d in digits {
            self.push(d);
        }
    }

    /// Adds the counts of an accumulator built from a disjoint stream.
    ///
    /// Windows straddling the two streams are not counted. Later pushes continue
    /// this accumulator's own stream.
    pub fn merge(&mut self, other: &OrbitAccumulator) -> Result<()> {
        if other.k_max != self.k_max || other.cap != self.cap {
            return Err(Error::CapMismatch("accumulators with different caps".into()));
        }
        self.n += other.n;
        self.max_digit = self.max_digit.max(other.max_digit);
        for k in 0..self.k_max {
            self.windows[k] += other.windows[k];
            self.overflow[k] += other.overflow[k];
            for (a, b) in self.counts[k].iter_mut().zip(&other.counts[k]) {
                *a += *b;
            }
        }
        Ok(())
    }

    pub fn horizon(&self) -> u64 {
        self.n
    }
    pub fn k_max(&self) -> usize {
        self.k_max
    }
    pub fn alphabet_cap(&self) -> Digit {
        self.cap
    }
    pub fn max_digit_seen(&self) -> Digit {
        self.max_digit
    }
    pub fn windows(&self, k: usize) -> u64 {
        self.windows[k - 1]
    }
    pub fn overflow(&self, k: usize) -> u64 {
        self.overflow[k - 1]
    }

    pub fn count_at(&self, k: usize, index: usize) -> u64 {
        self.counts[k - 1][index]
    }

    /// τ_u for a word u with |u| ≤ k_max; zero for words using letters above N.
    pub fn count(&self, word: &[Digit]) -> u64 {
        let k = word.len();
        if k == 0 || k > self.k_max || word.iter().any(|&d| d == 0 || d > self.cap) {
            return 0;
        }
        self.count_at(k, crate::symbolic::word::lex_index(word, self.cap))
    }

    /// p(u) = τ_u / (number of length-|u| windows).
    pub fn frequency(&self, word: &[Digit]) -> f64 {
        let k = word.len();
        if k == 0 {
            return 1.0;
        }
        if k > self.k_max || self.windows[k - 1] == 0 {
            return 0.0;
        }
        self.count(word) as f64 / self.windows[k - 1] as f64
    }

    /// Columnar text: a header row with totals, then one (word, count) row per nonzero count.
    pub fn to_text(&self) -> String {
        let join = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let mut out = String::new();
        let _ = writeln!(out, "n\tk_max\tN\twindows\toverflow\tmax_digit");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.n,
            self.k_max,
            self.cap,
            join(&self.windows),
            join(&self.overflow),
            self.max_digit
        );
        let _ = writeln!(out, "word\tcount");
        let mut buf = Vec::new();
        for k in 1..=self.k_max {
            for (i, &c) in self.counts[k - 1].iter().enumerate() {
                if c > 0 {
                    word_at(i, k, self.cap, &mut buf);
                    let _ = writeln!(out, "{}\t{}", format_digits(&buf), c);
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("accumulator text: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        lines.next().ok_or_else(|| bad("missing header"))?;
        let vals: Vec<&str> = lines.next().ok_or_else(|| bad("missing totals"))?.split('\t').collect();
        if vals.len() != 6 {
            return Err(bad("totals row needs 6 columns"));
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|e| bad(&e.to_string()));
        let list = |s: &str| s.split(';').map(num).collect::<Result<Vec<u64>>>();
        let n = num(vals[0])?;
        let k_max = num(vals[1])? as usize;
        let cap = num(vals[2])? as Digit;
        let mut acc = OrbitAccumulator::new(k_max, cap)?;
        acc.n = n;
        acc.windows = list(vals[3])?;
        acc.overflow = list(vals[4])?;
        acc.max_digit = num(vals[5])? as Digit;
        if acc.windows.len() != k_max || acc.overflow.len() != k_max {
            return Err(bad("per-k columns do not match k_max"));
        }
        lines.next().ok_or_else(|| bad("missing word/count header"))?;
        for line in lines {
            let (w, c) = line.split_once('\t').ok_or_else(|| bad("row needs two columns"))?;
            let w = parse_digits(w)?;
            if w.is_empty() || w.len() > k_max || w.iter().any(|&d| d > cap) {
                return Err(bad("word outside the accumulator family"));
            }
            let idx = crate::symbolic::word::lex_index(&w, cap);
            acc.counts[w.len() - 1][idx] = num(c)?;
        }
        for k in 0..k_max {
            let s: u64 = acc.counts[k].iter().sum();
            if s + acc.overflow[k] != acc.windows[k] {
                return Err(bad(&format!("counts at k={} do not add up", k + 1)));
            }
        }
        Ok(acc)
    }
}

/// Pulls `n` digits from the stream into a fresh accumulator.
pub fn accumulate_orbit<I: IntoIterator<Item = Digit>>(digits: I, n: usize, k_max: usize, cap: Digit) -> Result<OrbitAccumulator> {
    let mut acc = OrbitAccumulator::new(k_max, cap)?;
    let mut got = 0usize;
    for d in digits.into_iter().take(n) {
        acc.push(d);
        got += 1;
    }
    if got < n {
        return Err(Error::StreamExhausted { got, needed: n });
    }
    Ok(acc)
}

/// The orbit measure Δ_{x,n} = (1/n) Σ_{i<n} δ_{T^i x} of an infinite point, known
/// through a long enough prefix of x. Cylinders of length k need n + k − 1 digits.
#[derive(Clone, Debug)]
pub struct OrbitMeasure {
    digits: Vec<Digit>,
    n: usize,
    depth: usize,
    table: HashMap<Vec<Digit>, u32>,
}

impl OrbitMeasure {
    /// `digits` must hold at least `n + depth − 1` digits; cylinders up to `depth` are tabulated.
    pub fn new(digits: Vec<Digit>, n: usize, depth: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("orbit measure needs n ≥ 1".into()));
        }
        let needed = n + depth.saturating_sub(1);
        if digits.len() < needed {
            return Err(Error::StreamExhausted { got: digits.len(), needed });
        }
        let mut table = HashMap::new();
        for i in 0..n {
            for k in 1..=depth {
                *table.entry(digits[i..i + k].to_vec()).or_insert(0) += 1;
            }
        }
        Ok(OrbitMeasure { digits, n, depth, table })
    }
}

impl<T: Real> CylinderMeasure<T> for OrbitMeasure {
    fn mass(&self, word: &[Digit]) -> T {
        if word.is_empty() {
            return T::one();
        }
        let count = if word.len() <= self.depth {
            self.table.get(word).copied().unwrap_or(0) as usize
        } else {
            let k = word.len();
            (0..self.n)
                .filter(|&i| i + k <= self.digits.len() && &self.digits[i..i + k] == word)
                .count()
        };
        T::c(count as f64 / self.n as f64)
    }

    fn support_cap(&self) -> Option<Digit> {
        self.digits.iter().copied().max()
    }

    fn describe(&self) -> String {
        format!("orbit measure over {} shifts", self.n)
    }
}
