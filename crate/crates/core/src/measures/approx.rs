use crate::error::{Error, Result};
use crate::measures::markov::MarkovMeasure;
use crate::scalar::Real;
use crate::symbolic::word::{format_digits, lex_index, word_at};
use crate::symbolic::{for_each_positive, CylinderMeasure, Digit};

/// The Markov measure of order max(j − 1, 1) over letters 1..=N that agrees with
/// μ on all cylinders of length ≤ j.
///
/// For j = 1 this is the Bernoulli measure with weights μ([a]), stored as an
/// order-1 chain with identical rows. Rows are normalized by the enumerated
/// mass of their extensions, so a truncated source with letters above N yields
/// the conditional measure on Σ_N.
pub fn markov_approximation<T, M>(mu: &M, j: usize, cap: Digit) -> Result<MarkovMeasure<T>>
where
    T: Real,
    M: CylinderMeasure<T> + ?Sized,
{
    if j == 0 || cap == 0 {
        return Err(Error::InvalidInput("j and N must be positive".into()));
    }
    let a = cap as usize;
    if j == 1 {
        let mut w = Vec::with_capacity(a);
        mu.extension_masses(&[], cap, &mut w);
        let s: T = w.iter().copied().sum();
        if !(s > T::zero()) {
            return Err(Error::InvalidInput("no mass on letters ≤ N".into()));
        }
        let w: Vec<T> = w.into_iter().map(|x| x / s).collect();
        let transitions = (0..a).flat_map(|_| w.iter().copied()).collect();
        return MarkovMeasure::new(1, a, transitions, w);
    }
    let l = j - 1;
    let states = a
        .checked_pow(l as u32)
        .filter(|&s| s <= 1 << 22)
        .ok_or_else(|| Error::InvalidInput("too many states".into()))?;
    let mut block = vec![T::zero(); states * a];
    for_each_positive(mu, j, cap, |w, m| {
        block[lex_index(w, cap)] = m;
    })?;
    let mut transitions = vec![T::zero(); states * a];
    let mut stationary = vec![T::zero(); states];
    let mut buf = Vec::new();
    for s in 0..states {
        let row = &block[s * a..(s + 1) * a];
        let sum: T = row.iter().copied().sum();
        word_at(s, l, cap, &mut buf);
        let prefix = mu.mass(&buf);
        if sum > T::zero() && !(prefix > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "cylinder extending {} has mass but its prefix has none",
                format_digits(&buf)
            )));
        }
        if sum > T::zero() {
            for x in 0..a {
                transitions[s * a + x] = row[x] / sum;
            }
        } else {
            for x in 0..a {
                transitions[s * a + x] = T::one() / T::from_usize_lossy(a);
            }
        }
        stationary[s] = sum;
    }
    let total: T = stationary.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::InvalidInput("no mass on Σ_N^j".into()));
    }
    for p in stationary.iter_mut() {
        *p = *p / total;
    }
    match MarkovMeasure::new(l, a, transitions.clone(), stationary) {
        Ok(m) => Ok(m),
        // truncated sources need not be invariant on Σ_N; fall back to the chain's own stationary vector
        Err(Error::InvalidInput(msg)) if msg.contains("not invariant") => MarkovMeasure::from_transitions(l, a, transitions),
        Err(e) => Err(e),
    }
}
