use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::measures::bernoulli::Bernoulli;
use crate::scalar::Real;
use crate::symbolic::word::{lex_index, word_at};
use crate::symbolic::{CylinderMeasure, Digit};

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;

/// Stationary l-step Markov measure over the letters 1..=A.
///
/// States are the A^l words of length l in lexicographic order; `transitions`
/// holds for each state the probabilities of the next letter.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMeasure<T> {
    order: usize,
    alphabet: usize,
    transitions: Vec<T>,
    stationary: Vec<T>,
    cumulative: Vec<T>,
    sample_rows: Vec<f64>,
    sample_start: Vec<f64>,
}

impl<T: Real> MarkovMeasure<T> {
    /// Builds the measure from transitions and a stationary vector, validating both.
    pub fn new(order: usize, alphabet: usize, transitions: Vec<T>, stationary: Vec<T>) -> Result<Self> {
        let states = state_count(order, alphabet)?;
        if transitions.len() != states * alphabet {
            return Err(invalid(format!(
                "expected {} transition entries, got {}",
                states * alphabet,
                transitions.len()
            )));
        }
        if stationary.len() != states {
            return Err(invalid(format!("expected {states} stationary entries, got {}", stationary.len())));
        }
        for (s, row) in transitions.chunks(alphabet).enumerate() {
            if row.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
                return Err(invalid(format!("row {s} has a negative or non-finite entry")));
            }
            let sum: T = row.iter().copied().sum();
            if (sum - T::one()).abs() > T::c(ROW_TOL) {
                return Err(invalid(format!("row {s} sums to {sum}")));
            }
        }
        if stationary.iter().any(|&p| !(p >= T::zero())) {
            return Err(invalid("stationary vector has a negative entry"));
        }
        let total: T = stationary.iter().copied().sum();
        if (total - T::one()).abs() > T::c(STATIONARY_TOL) {
            return Err(invalid(format!("stationary vector sums to {total}")));
        }
        let m = MarkovMeasure::assemble(order, alphabet, transitions, stationary);
        let residual = m.stationarity_residual();
        if residual > T::c(STATIONARY_TOL) {
            return Err(invalid(format!("stationary vector not invariant (residual {residual:e})")));
        }
        Ok(m)
    }

    /// Builds the measure from transitions, solving for a stationary vector.
    pub fn from_transitions(order: usize, alphabet: usize, transitions: Vec<T>) -> Result<Self> {
        let states = state_count(order, alphabet)?;
        if transitions.len() != states * alphabet {
            return Err(invalid("transition table has the wrong size"));
        }
        let stationary = solve_stationary(order, alphabet, &transitions)?;
        MarkovMeasure::new(order, alphabet, transitions, stationary)
    }

    /// Order-1 chain with the given row-major matrix.
    pub fn order_one(rows: &[Vec<T>]) -> Result<Self> {
        let a = rows.len();
        if rows.iter().any(|r| r.len() != a) {
            return Err(invalid("transition matrix must be square"));
        }
        MarkovMeasure::from_transitions(1, a, rows.concat())
    }

    /// Bernoulli measure stored as an order-1 chain with identical rows.
    pub fn from_bernoulli(b: &Bernoulli<T>) -> Self {
        let p = b.weights().to_vec();
        let a = p.len();
        let transitions = (0..a).flat_map(|_| p.iter().copied()).collect();
        MarkovMeasure::assemble(1, a, transitions, p)
    }

    /// Point mass on the periodic orbit of w^∞, as a deterministic chain of order |w|.
    pub fn periodic(word: &[Digit]) -> Result<Self> {
        if word.is_empty() || word.contains(&0) {
            return Err(invalid("period word must be nonempty with positive digits"));
        }
        let l = word.len();
        let a = *word.iter().max().unwrap() as usize;
        let states = state_count(l, a)?;
        let mut transitions = vec![T::zero(); states * a];
        let mut stationary = vec![T::zero(); states];
        let mut to_uniform = vec![true; states];
        let cyc: Vec<Digit> = word.iter().chain(word.iter()).copied().collect();
        let mut counts = vec![0usize; states];
        for i in 0..l {
            let s = lex_index(&cyc[i..i + l], a as Digit);
            counts[s] += 1;
            to_uniform[s] = false;
            transitions[s * a + (cyc[i + l] - 1) as usize] = T::one();
        }
        for (s, &c) in counts.iter().enumerate() {
            stationary[s] = T::from_usize_lossy(c) / T::from_usize_lossy(l);
        }
        for s in 0..states {
            if to_uniform[s] {
                for x in 0..a {
                    transitions[s * a + x] = T::one() / T::from_usize_lossy(a);
                }
            } else if counts[s] > 1 {
                // w is a power of a shorter word: the successor is unique anyway
                let row = &mut transitions[s * a..(s + 1) * a];
                let sum: T = row.iter().copied().sum();
                for p in row.iter_mut() {
                    *p = *p / sum;
                }
            }
        }
        MarkovMeasure::new(l, a, transitions, stationary)
    }

    fn assemble(order: usize, alphabet: usize, transitions: Vec<T>, stationary: Vec<T>) -> Self {
        let mut cumulative = Vec::with_capacity(stationary.len() + 1);
        let mut acc = T::zero();
        cumulative.push(acc);
        for &p in &stationary {
            acc = acc + p;
            cumulative.push(acc);
        }
        let mut sample_rows = Vec::with_capacity(transitions.len());
        for row in transitions.chunks(alphabet) {
            let mut c = 0.0;
            for &p in row {
                c += p.as_f64();
                sample_rows.push(c);
            }
        }
        let mut sample_start = Vec::with_capacity(stationary.len());
        let mut c = 0.0;
        for &p in &stationary {
            c += p.as_f64();
            sample_start.push(c);
        }
        MarkovMeasure {
            order,
            alphabet,
            transitions,
            stationary,
            cumulative,
            sample_rows,
            sample_start,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }
    pub fn states(&self) -> usize {
        self.stationary.len()
    }
    pub fn transitions(&self) -> &[T] {
        &self.transitions
    }
    pub fn stationary(&self) -> &[T] {
        &self.stationary
    }

    /// P(state → next letter a).
    pub fn transition(&self, state: usize, a: Digit) -> T {
        self.transitions[state * self.alphabet + (a - 1) as usize]
    }

    fn next_state(&self, state: usize, a: Digit) -> usize {
        let m = self.states() / self.alphabet;
        (state % m) * self.alphabet + (a - 1) as usize
    }

    /// max_t |Σ_s π(s) P(s → t) − π(t)|.
    pub fn stationarity_residual(&self) -> T {
        let mut image = vec![T::zero(); self.states()];
        for s in 0..self.states() {
            for a in 1..=self.alphabet as Digit {
                let t = self.next_state(s, a);
                image[t] = image[t] + self.stationary[s] * self.transition(s, a);
            }
        }
        image
            .iter()
            .zip(&self.stationary)
            .map(|(&x, &y)| (x - y).abs())
            .fold(T::zero(), T::max)
    }

    /// Entropy Σ_s π(s) Σ_a −P(s,a) ln P(s,a).
    pub fn entropy(&self) -> T {
        let mut h = T::zero();
        for s in 0..self.states() {
            if self.stationary[s] == T::zero() {
                continue;
            }
            let row = &self.transitions[s * self.alphabet..(s + 1) * self.alphabet];
            let hs: T = row.iter().filter(|&&p| p > T::zero()).map(|&p| -p * p.ln()).sum();
            h = h + self.stationary[s] * hs;
        }
        h
    }

    /// Whether the transition graph restricted to states of positive stationary
    /// mass is irreducible and aperiodic.
    pub fn is_primitive(&self) -> bool {
        let live: Vec<usize> = (0..self.states()).filter(|&s| self.stationary[s] > T::zero()).collect();
        if live.is_empty() {
            return false;
        }
        let n = self.states();
        let edges = |s: usize| {
            (1..=self.alphabet as Digit)
                .filter(move |&a| self.transition(s, a) > T::zero())
                .map(move |a| self.next_state(s, a))
        };
        let bfs = |start: usize, forward: bool| -> Vec<Option<usize>> {
            let mut level = vec![None; n];
            level[start] = Some(0);
            let mut q = VecDeque::from([start]);
            while let Some(s) = q.pop_front() {
                let next: Vec<usize> = if forward {
                    edges(s).collect()
                } else {
                    (0..n).filter(|&p| edges(p).any(|t| t == s)).collect()
                };
                for t in next {
                    if level[t].is_none() {
                        level[t] = Some(level[s].unwrap() + 1);
                        q.push_back(t);
                    }
                }
            }
            level
        };
        let root = live[0];
        let fwd = bfs(root, true);
        if live.iter().any(|&s| fwd[s].is_none()) {
            return false;
        }
        if n <= 4096 {
            let back = bfs(root, false);
            if live.iter().any(|&s| back[s].is_none()) {
                return false;
            }
        }
        let mut g = 0usize;
        for &s in &live {
            let ls = fwd[s].unwrap();
            for t in edges(s) {
                if let Some(lt) = fwd[t] {
                    g = gcd(g, (ls + 1).abs_diff(lt));
                }
            }
        }
        g == 1
    }

    /// Samples n digits from the stationary chain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Digit> {
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        let u: f64 = rng.gen();
        let total = *self.sample_start.last().unwrap();
        let mut state = self
            .sample_start
            .iter()
            .position(|&c| u * total < c)
            .unwrap_or(self.states() - 1);
        let mut first = Vec::new();
        word_at(state, self.order, self.alphabet as Digit, &mut first);
        out.extend(first.iter().take(n));
        while out.len() < n {
            let row = &self.sample_rows[state * self.alphabet..(state + 1) * self.alphabet];
            let u: f64 = rng.gen::<f64>() * row[self.alphabet - 1];
            let idx = row.iter().position(|&c| u < c).unwrap_or(self.alphabet - 1);
            let a = idx as Digit + 1;
            out.push(a);
            state = self.next_state(state, a);
        }
        out
    }

    /// Structured text: order, alphabet, state list, row-major transitions, stationary vector.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "order {}", self.order);
        let _ = writeln!(out, "alphabet {}", self.alphabet);
        let _ = writeln!(out, "states");
        let mut buf = Vec::new();
        for s in 0..self.states() {
            word_at(s, self.order, self.alphabet as Digit, &mut buf);
            let _ = writeln!(out, "{}", crate::symbolic::word::format_digits(&buf));
        }
        let _ = writeln!(out, "transitions");
        for row in self.transitions.chunks(self.alphabet) {
            let r: Vec<String> = row.iter().map(|p| format!("{p}")).collect();
            let _ = writeln!(out, "{}", r.join(" "));
        }
        let _ = writeln!(out, "stationary");
        let r: Vec<String> = self.stationary.iter().map(|p| format!("{p}")).collect();
        let _ = writeln!(out, "{}", r.join(" "));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("markov text: {m}"));
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<usize> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            let rest = line
                .strip_prefix(key)
                .ok_or_else(|| bad(format!("expected {key:?}, got {line:?}")))?;
            rest.trim().parse().map_err(|e| bad(format!("{key}: {e}")))
        };
        let order = header("order")?;
        let alphabet = header("alphabet")?;
        let states = state_count(order, alphabet)?;
        let rest: Vec<&str> = lines.collect();
        let pos = |key: &str| rest.iter().position(|l| *l == key).ok_or_else(|| bad(format!("missing section {key}")));
        let (ps, pt, pst) = (pos("states")?, pos("transitions")?, pos("stationary")?);
        if !(ps < pt && pt < pst) {
            return Err(bad("sections out of order".into()));
        }
        let mut buf = Vec::new();
        let listed = &rest[ps + 1..pt];
        if listed.len() != states {
            return Err(bad(format!("expected {states} states, got {}", listed.len())));
        }
        for (s, line) in listed.iter().enumerate() {
            word_at(s, order, alphabet as Digit, &mut buf);
            if crate::symbolic::word::parse_digits(line)? != buf {
                return Err(bad(format!("state {s} listed as {line:?}")));
            }
        }
        let nums = |lines: &[&str]| -> Result<Vec<T>> {
            lines
                .iter()
                .flat_map(|l| l.split_whitespace())
                .map(|t| t.parse::<f64>().map(T::c).map_err(|e| bad(format!("{t:?}: {e}"))))
                .collect()
        };
        let transitions = nums(&rest[pt + 1..pst])?;
        let stationary = nums(&rest[pst + 1..])?;
        MarkovMeasure::new(order, alphabet, transitions, stationary)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn state_count(order: usize, alphabet: usize) -> Result<usize> {
    if order == 0 || alphabet == 0 {
        return Err(invalid("order and alphabet must be positive"));
    }
    (0..order)
        .try_fold(1usize, |acc, _| acc.checked_mul(alphabet))
        .filter(|&s| s <= 1 << 24)
        .ok_or_else(|| invalid(format!("too many states: {alphabet}^{order}")))
}

/// Stationary vector of the chain: direct solve for small chains, lazy power
/// iteration otherwise.
fn solve_stationary<T: Real>(order: usize, alphabet: usize, transitions: &[T]) -> Result<Vec<T>> {
    let n = state_count(order, alphabet)?;
    let m = n / alphabet;
    let next = |s: usize, a: usize| (s % m) * alphabet + a;
    if n <= 400 {
        // (Pᵀ − I)π = 0 with the last equation replaced by Σπ = 1
        let mut a = vec![vec![T::zero(); n + 1]; n];
        for s in 0..n {
            for x in 0..alphabet {
                let t = next(s, x);
                a[t][s] = a[t][s] + transitions[s * alphabet + x];
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = row[i] - T::one();
        }
        for j in 0..=n {
            a[n - 1][j] = T::one();
        }
        if let Some(pi) = gauss_solve(a) {
            if pi.iter().all(|&p| p >= -T::c(1e-13)) {
                return Ok(pi.into_iter().map(|p| p.max(T::zero())).collect());
            }
        }
    }
    let half = T::c(0.5);
    let mut pi = vec![T::one() / T::from_usize_lossy(n); n];
    for _ in 0..200_000 {
        let mut next_pi: Vec<T> = pi.iter().map(|&p| half * p).collect();
        for s in 0..n {
            for x in 0..alphabet {
                let t = next(s, x);
                next_pi[t] = next_pi[t] + half * pi[s] * transitions[s * alphabet + x];
            }
        }
        let diff = next_pi
            .iter()
            .zip(&pi)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        pi = next_pi;
        if diff < T::c(1e-15) {
            let s: T = pi.iter().copied().sum();
            return Ok(pi.into_iter().map(|p| p / s).collect());
        }
    }
    Err(Error::Numeric("stationary vector did not converge".into()))
}

fn gauss_solve<T: Real>(mut a: Vec<Vec<T>>) -> Option<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < T::c(1e-14) {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != T::zero() {
                    for c in col..=n {
                        let v = a[col][c];
                        a[r][c] = a[r][c] - f * v;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

impl<T: Real> CylinderMeasure<T> for MarkovMeasure<T> {
    fn mass(&self, word: &[Digit]) -> T {
        let a = self.alphabet as Digit;
        if word.iter().any(|&d| d == 0 || d > a) {
            return T::zero();
        }
        let l = self.order;
        if word.len() < l {
            let span = self.alphabet.pow((l - word.len()) as u32);
            let lo = lex_index(word, a) * span;
            return self.cumulative[lo + span] - self.cumulative[lo];
        }
        let mut state = lex_index(&word[..l], a);
        let mut m = self.stationary[state];
        for &d in &word[l..] {
            if m == T::zero() {
                return m;
            }
            m = m * self.transition(state, d);
            state = self.next_state(state, d);
        }
        m
    }

    fn log_mass(&self, word: &[Digit]) -> T {
        let a = self.alphabet as Digit;
        if word.iter().any(|&d| d == 0 || d > a) {
            return T::neg_infinity();
        }
        let l = self.order;
        if word.len() < l {
            return self.mass(word).ln();
        }
        let mut state = lex_index(&word[..l], a);
        let mut m = self.stationary[state].ln();
        for &d in &word[l..] {
            m = m + self.transition(state, d).ln();
            state = self.next_state(state, d);
        }
        m
    }

    fn support_cap(&self) -> Option<Digit> {
        Some(self.alphabet as Digit)
    }

    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        out.clear();
        let a = self.alphabet as Digit;
        if word.len() < self.order || word.iter().any(|&d| d > a) {
            let mut buf = word.to_vec();
            buf.push(1);
            for x in 1..=cap {
                *buf.last_mut().unwrap() = x;
                out.push(self.mass(&buf));
            }
            return;
        }
        let m = self.mass(word);
        let state = lex_index(&word[word.len() - self.order..], a);
        for x in 1..=cap {
            out.push(if x <= a { m * self.transition(state, x) } else { T::zero() });
        }
    }

    fn describe(&self) -> String {
        format!("markov(order={}, alphabet={})", self.order, self.alphabet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> MarkovMeasure<f64> {
        MarkovMeasure::order_one(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn stationary_and_entropy() {
        let m = example();
        assert!((m.stationary()[0] - 5.0 / 6.0).abs() < 1e-14);
        let h = |p: f64| -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        let closed = 5.0 / 6.0 * h(0.9) + 1.0 / 6.0 * h(0.5);
        assert!((m.entropy() - closed).abs() < 1e-14);
        assert!((m.entropy() - 0.38645).abs() < 1e-4);
    }

    #[test]
    fn consistency_and_invariance() {
        let m = example();
        for w in [vec![1u32], vec![2, 1], vec![1, 1, 2]] {
            let right: f64 = (1..=2).map(|a| m.mass(&[w.clone(), vec![a]].concat())).sum();
            let left: f64 = (1..=2).map(|a| m.mass(&[vec![a], w.clone()].concat())).sum();
            assert!((right - m.mass(&w)).abs() < 1e-15);
            assert!((left - m.mass(&w)).abs() < 1e-15);
        }
    }

    #[test]
    fn periodic_chain() {
        let m = MarkovMeasure::<f64>::periodic(&[1, 2]).unwrap();
        assert_eq!(m.mass(&[1, 2, 1]), 0.5);
        assert_eq!(m.mass(&[1, 1]), 0.0);
        assert_eq!(m.entropy(), 0.0);
        assert!(!m.is_primitive());
        assert!(example().is_primitive());
    }

    #[test]
    fn text_round_trip() {
        let m = example();
        let back = MarkovMeasure::<f64>::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        assert!(MarkovMeasure::<f64>::order_one(&[vec![0.9, 0.2], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn second_order_prefix_masses() {
        let t = vec![0.7, 0.3, 0.4, 0.6, 0.2, 0.8, 0.5, 0.5];
        let m = MarkovMeasure::<f64>::from_transitions(2, 2, t).unwrap();
        let direct: f64 = (1..=2).map(|a| m.mass(&[2, a])).sum();
        assert!((m.mass(&[2]) - direct).abs() < 1e-15);
        assert!(m.stationarity_residual() < 1e-14);
    }
}
