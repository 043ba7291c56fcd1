use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::symbolic::word::{format_digits, lex_index, parse_digits, word_at};
use crate::symbolic::{CylinderMeasure, Digit};

/// Measure given by a table of cylinder masses up to some depth D over the
/// letters 1..=N. Longer cylinders use the order-(D−1) Markov extension, so the
/// measure is consistent at every depth.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderTable<T> {
    depth: usize,
    cap: Digit,
    levels: Vec<Vec<T>>,
    exact: bool,
}

impl<T: Real> CylinderTable<T> {
    /// Tabulates μ on Σ_N^k for k ≤ depth.
    pub fn tabulate<M: CylinderMeasure<T> + ?Sized>(mu: &M, depth: usize, cap: Digit) -> Result<Self> {
        if depth == 0 || cap == 0 {
            return Err(invalid("table depth and cap must be positive"));
        }
        let mut levels = Vec::with_capacity(depth);
        for k in 1..=depth {
            let size = (cap as usize)
                .checked_pow(k as u32)
                .filter(|&s| s <= 1 << 24)
                .ok_or_else(|| invalid("table too large"))?;
            let mut level = vec![T::zero(); size];
            crate::symbolic::for_each_positive(mu, k, cap, |w, m| {
                level[lex_index(w, cap)] = m;
            })?;
            levels.push(level);
        }
        let exact = mu.is_exact() && matches!(mu.support_cap(), Some(c) if c <= cap);
        Ok(CylinderTable { depth, cap, levels, exact })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cap(&self) -> Digit {
        self.cap
    }

    /// 1 − Σ_{|ω|=k} μ([ω]) for k ≤ depth.
    pub fn defect(&self, k: usize) -> T {
        T::one() - self.levels[k - 1].iter().copied().sum::<T>()
    }

    fn lookup(&self, word: &[Digit]) -> T {
        if word.is_empty() {
            return T::one();
        }
        self.levels[word.len() - 1][lex_index(word, self.cap)]
    }

    /// (word, mass) rows preceded by a header with depth, cap and per-depth defect.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let defects: Vec<String> = (1..=self.depth).map(|k| format!("{}", self.defect(k))).collect();
        let _ = writeln!(out, "depth\tN\tdefect");
        let _ = writeln!(out, "{}\t{}\t{}", self.depth, self.cap, defects.join(";"));
        let _ = writeln!(out, "word\tmass");
        let mut buf = Vec::new();
        for (k, level) in self.levels.iter().enumerate() {
            for (i, &m) in level.iter().enumerate() {
                if m > T::zero() {
                    word_at(i, k + 1, self.cap, &mut buf);
                    let _ = writeln!(out, "{}\t{}", format_digits(&buf), m);
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("cylinder table: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        lines.next().ok_or_else(|| bad("missing header"))?;
        let head: Vec<&str> = lines.next().ok_or_else(|| bad("missing totals"))?.split('\t').collect();
        if head.len() < 2 {
            return Err(bad("header needs depth and N"));
        }
        let depth: usize = head[0].trim().parse().map_err(|_| bad("depth"))?;
        let cap: Digit = head[1].trim().parse().map_err(|_| bad("N"))?;
        if depth == 0 || cap == 0 {
            return Err(bad("depth and N must be positive"));
        }
        let mut levels: Vec<Vec<T>> = (1..=depth).map(|k| vec![T::zero(); (cap as usize).pow(k as u32)]).collect();
        lines.next().ok_or_else(|| bad("missing row header"))?;
        for line in lines {
            let (w, m) = line.split_once('\t').ok_or_else(|| bad("row needs two columns"))?;
            let w = parse_digits(w)?;
            if w.is_empty() || w.len() > depth || w.iter().any(|&d| d > cap) {
                return Err(bad("word outside the table family"));
            }
            let m: f64 = m.trim().parse().map_err(|_| bad("mass"))?;
            if !(0.0..=1.0 + 1e-12).contains(&m) {
                return Err(Error::MassOutOfRange { word: format_digits(&w), mass: m });
            }
            levels[w.len() - 1][lex_index(&w, cap)] = T::c(m);
        }
        Ok(CylinderTable { depth, cap, levels, exact: false })
    }
}

impl<T: Real> CylinderMeasure<T> for CylinderTable<T> {
    fn mass(&self, word: &[Digit]) -> T {
        if word.iter().any(|&d| d == 0 || d > self.cap) {
            return T::zero();
        }
        let d = self.depth;
        if word.len() <= d {
            return self.lookup(word);
        }
        let mut m = self.lookup(&word[..d]);
        for end in d + 1..=word.len() {
            if m == T::zero() {
                return m;
            }
            let num = self.lookup(&word[end - d..end]);
            let den = self.lookup(&word[end - d..end - 1]);
            m = if den > T::zero() { m * num / den } else { T::zero() };
        }
        m
    }

    fn support_cap(&self) -> Option<Digit> {
        Some(self.cap)
    }

    fn is_exact(&self) -> bool {
        self.exact
    }

    fn describe(&self) -> String {
        format!("table(depth={}, N={})", self.depth, self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MarkovMeasure;

    #[test]
    fn tabulated_markov_extends_exactly() {
        let m = MarkovMeasure::<f64>::order_one(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let t = CylinderTable::tabulate(&m, 3, 2).unwrap();
        for w in [vec![1u32, 2, 2, 1, 1], vec![2, 2, 2, 2]] {
            assert!((t.mass(&w) - m.mass(&w)).abs() < 1e-15);
        }
        assert!(t.defect(3).abs() < 1e-15);
        let back = CylinderTable::<f64>::from_text(&t.to_text()).unwrap();
        assert_eq!(back.mass(&[1, 2, 1]), t.mass(&[1, 2, 1]));
    }
}
