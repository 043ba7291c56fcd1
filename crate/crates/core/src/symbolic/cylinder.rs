use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbolic::word::{format_digits, Digit};

/// A shift-invariant probability measure on ℕ^ℕ queried through its cylinders.
pub trait CylinderMeasure<T: Real>: Send + Sync {
    /// μ([ω]); the empty word has mass 1.
    fn mass(&self, word: &[Digit]) -> T;

    /// ln μ([ω]); overridden by product-form measures so long words do not underflow.
    fn log_mass(&self, word: &[Digit]) -> T {
        self.mass(word).ln()
    }

    /// Largest letter carrying mass, if the support is finite.
    fn support_cap(&self) -> Option<Digit>;

    /// Whether masses are exact (as opposed to computed from a truncated model).
    fn is_exact(&self) -> bool {
        true
    }

    /// Masses μ([ωa]) for a = 1..=cap written into `out`.
    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        out.clear();
        let mut buf = Vec::with_capacity(word.len() + 1);
        buf.extend_from_slice(word);
        buf.push(1);
        for a in 1..=cap {
            *buf.last_mut().unwrap() = a;
            out.push(self.mass(&buf));
        }
    }

    fn describe(&self) -> String;
}

impl<T: Real, M: CylinderMeasure<T> + ?Sized> CylinderMeasure<T> for &M {
    fn mass(&self, word: &[Digit]) -> T {
        (**self).mass(word)
    }
    fn log_mass(&self, word: &[Digit]) -> T {
        (**self).log_mass(word)
    }
    fn support_cap(&self) -> Option<Digit> {
        (**self).support_cap()
    }
    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }
    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        (**self).extension_masses(word, cap, out)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<T: Real, M: CylinderMeasure<T> + ?Sized> CylinderMeasure<T> for Box<M> {
    fn mass(&self, word: &[Digit]) -> T {
        (**self).mass(word)
    }
    fn log_mass(&self, word: &[Digit]) -> T {
        (**self).log_mass(word)
    }
    fn support_cap(&self) -> Option<Digit> {
        (**self).support_cap()
    }
    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }
    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        (**self).extension_masses(word, cap, out)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<T: Real, M: CylinderMeasure<T> + ?Sized> CylinderMeasure<T> for std::sync::Arc<M> {
    fn mass(&self, word: &[Digit]) -> T {
        (**self).mass(word)
    }
    fn log_mass(&self, word: &[Digit]) -> T {
        (**self).log_mass(word)
    }
    fn support_cap(&self) -> Option<Digit> {
        (**self).support_cap()
    }
    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }
    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        (**self).extension_masses(word, cap, out)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Depth-first walk over nonempty words of length ≤ `depth` with letters ≤ `cap`,
/// in lexicographic order. `visit` returns whether to descend below the word.
pub fn walk_words<F: FnMut(&[Digit]) -> bool>(depth: usize, cap: Digit, mut visit: F) {
    if depth == 0 || cap == 0 {
        return;
    }
    let mut word: Vec<Digit> = vec![1];
    loop {
        let descend = visit(&word) && word.len() < depth;
        if descend {
            word.push(1);
            continue;
        }
        // advance to the next sibling, popping exhausted levels
        loop {
            let last = word.last_mut().unwrap();
            if *last < cap {
                *last += 1;
                break;
            }
            word.pop();
            if word.is_empty() {
                return;
            }
        }
    }
}

/// Visits every word of length exactly `k` over {1..cap} with positive μ-mass,
/// passing the mass. Zero-mass prefixes are pruned. Masses outside [0,1] beyond
/// rounding slack are reported as errors.
pub fn for_each_positive<T, M, F>(mu: &M, k: usize, cap: Digit, mut visit: F) -> Result<()>
where
    T: Real,
    M: CylinderMeasure<T> + ?Sized,
    F: FnMut(&[Digit], T),
{
    if k == 0 {
        visit(&[], T::one());
        return Ok(());
    }
    let slack = T::c(1e-12);
    let mut word: Vec<Digit> = Vec::with_capacity(k);
    let mut stack: Vec<Vec<T>> = (0..k).map(|_| Vec::with_capacity(cap as usize)).collect();
    let mut pos: Vec<usize> = vec![0; k];
    mu.extension_masses(&word, cap, &mut stack[0]);
    let mut level = 0usize;
    loop {
        if pos[level] >= stack[level].len() {
            if level == 0 {
                return Ok(());
            }
            level -= 1;
            word.pop();
            pos[level] += 1;
            continue;
        }
        let i = pos[level];
        let m = stack[level][i];
        if !(m >= -slack && m <= T::one() + slack) {
            word.push(i as Digit + 1);
            return Err(Error::MassOutOfRange {
                word: format_digits(&word),
                mass: m.as_f64(),
            });
        }
        if m > T::zero() {
            word.push(i as Digit + 1);
            if level + 1 == k {
                visit(&word, m);
                word.pop();
                pos[level] += 1;
            } else {
                let mut next = std::mem::take(&mut stack[level + 1]);
                mu.extension_masses(&word, cap, &mut next);
                stack[level + 1] = next;
                level += 1;
                pos[level] = 0;
            }
        } else {
            pos[level] += 1;
        }
    }
}
