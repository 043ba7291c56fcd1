use crate::error::{invalid, Result};
use crate::measures::markov::MarkovMeasure;
use crate::scalar::Real;
use crate::symbolic::{CylinderMeasure, Digit};

/// Image of a stationary order-1 chain on hidden states under a letter map.
///
/// Such measures are generally not Markov of any finite order, which makes them
/// useful test sources for Markov approximation.
#[derive(Clone, Debug)]
pub struct HiddenMarkovMeasure<T> {
    chain: MarkovMeasure<T>,
    emit: Vec<Digit>,
}

impl<T: Real> HiddenMarkovMeasure<T> {
    /// `emit[s]` is the letter shown in hidden state s + 1.
    pub fn new(chain: MarkovMeasure<T>, emit: Vec<Digit>) -> Result<Self> {
        if chain.order() != 1 {
            return Err(invalid("hidden chain must have order 1"));
        }
        if emit.len() != chain.alphabet() || emit.contains(&0) {
            return Err(invalid("need one positive letter per hidden state"));
        }
        Ok(HiddenMarkovMeasure { chain, emit })
    }

    fn forward(&self, word: &[Digit]) -> Vec<T> {
        let n = self.emit.len();
        let mut alpha: Vec<T> = (0..n)
            .map(|s| if self.emit[s] == word[0] { self.chain.stationary()[s] } else { T::zero() })
            .collect();
        for &d in &word[1..] {
            let mut next = vec![T::zero(); n];
            for (s, &a) in alpha.iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (t, slot) in next.iter_mut().enumerate() {
                    if self.emit[t] == d {
                        *slot = *slot + a * self.chain.transition(s, t as Digit + 1);
                    }
                }
            }
            alpha = next;
        }
        alpha
    }
}

impl<T: Real> CylinderMeasure<T> for HiddenMarkovMeasure<T> {
    fn mass(&self, word: &[Digit]) -> T {
        if word.is_empty() {
            return T::one();
        }
        self.forward(word).into_iter().sum()
    }

    fn support_cap(&self) -> Option<Digit> {
        self.emit.iter().copied().max()
    }

    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        out.clear();
        if word.is_empty() {
            let mut buf = vec![1];
            for a in 1..=cap {
                buf[0] = a;
                out.push(self.mass(&buf));
            }
            return;
        }
        let alpha = self.forward(word);
        out.resize(cap as usize, T::zero());
        for (s, &a) in alpha.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (t, &e) in self.emit.iter().enumerate() {
                if e <= cap {
                    out[(e - 1) as usize] = out[(e - 1) as usize] + a * self.chain.transition(s, t as Digit + 1);
                }
            }
        }
    }

    fn describe(&self) -> String {
        format!("hidden-markov({} hidden states)", self.emit.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistent_and_invariant() {
        let chain = MarkovMeasure::<f64>::order_one(&[
            vec![0.1, 0.6, 0.3],
            vec![0.5, 0.2, 0.3],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let h = HiddenMarkovMeasure::new(chain, vec![1, 1, 2]).unwrap();
        let w = [1u32, 2, 1];
        let right: f64 = (1..=2).map(|a| h.mass(&[w.to_vec(), vec![a]].concat())).sum();
        let left: f64 = (1..=2).map(|a| h.mass(&[vec![a], w.to_vec()].concat())).sum();
        assert!((right - h.mass(&w)).abs() < 1e-15);
        assert!((left - h.mass(&w)).abs() < 1e-15);
        let mut ext = Vec::new();
        h.extension_masses(&w, 3, &mut ext);
        assert!((ext[1] - h.mass(&[1, 2, 1, 2])).abs() < 1e-16);
        assert_eq!(ext[2], 0.0);
    }
}
