use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::potential::{Potential, SplitKernel};
use crate::scalar::Real;
use crate::symbolic::word::word_at;
use crate::symbolic::Digit;

/// How transfer-operator products are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Kernel route when the potential offers a split kernel, dense otherwise.
    #[default]
    Auto,
    /// Stores all N^(d+1) transfer weights.
    Dense,
    /// Polynomial expansion of the split kernel in its real coordinate.
    Kernel,
}

const DENSE_LIMIT: usize = 60_000_000;
const KERNEL_DEGREES: [usize; 6] = [16, 24, 32, 40, 48, 64];

enum Backend<T> {
    Dense {
        w: Vec<T>,
    },
    Kernel {
        coeffs: Vec<T>,
        m: usize,
        t: Vec<T>,
    },
}

/// The depth-d transfer matrix M[u→v] = exp φ(u·last(v)) on the blocks Σ_N^d,
/// where v = u_2⋯u_d a. States are indexed lexicographically.
pub struct TransferOperator<T> {
    cap: Digit,
    depth: usize,
    states: usize,
    backend: Backend<T>,
}

impl<T: Real> TransferOperator<T> {
    pub fn build<P: Potential<T> + ?Sized>(phi: &P, cap: Digit, depth: usize, route: Route) -> Result<Self> {
        if cap == 0 || depth == 0 {
            return Err(Error::InvalidInput("cap and depth must be positive".into()));
        }
        let states = (cap as usize)
            .checked_pow(depth as u32)
            .filter(|&s| s <= 1 << 26)
            .ok_or_else(|| Error::InvalidInput(format!("{cap}^{depth} states is too many")))?;
        let use_kernel = match route {
            Route::Dense => false,
            Route::Kernel => {
                if phi.kernel().is_none() {
                    return Err(Error::InvalidInput(format!("potential {} has no split kernel", phi.id())));
                }
                true
            }
            Route::Auto => phi.kernel().is_some(),
        };
        let backend = if use_kernel {
            kernel_backend(phi.kernel().unwrap(), cap, depth, states)?
        } else {
            dense_backend(phi, cap, depth, states)?
        };
        Ok(TransferOperator { cap, depth, states, backend })
    }

    pub fn states(&self) -> usize {
        self.states
    }
    pub fn cap(&self) -> Digit {
        self.cap
    }
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn route(&self) -> Route {
        match self.backend {
            Backend::Dense { .. } => Route::Dense,
            Backend::Kernel { .. } => Route::Kernel,
        }
    }

    /// (M x)(u) = Σ_v M[u→v] x(v).
    pub fn apply(&self, x: &[T], out: &mut [T]) {
        let n = self.cap as usize;
        let s1 = self.states / n;
        match &self.backend {
            Backend::Dense { w } => {
                for b in 0..n {
                    let wb = &w[b * self.states..(b + 1) * self.states];
                    for s in 0..s1 {
                        let lo = s * n;
                        let mut acc = T::zero();
                        for j in lo..lo + n {
                            acc = acc + wb[j] * x[j];
                        }
                        out[b * s1 + s] = acc;
                    }
                }
            }
            Backend::Kernel { coeffs, m, t } => {
                let m = *m;
                let mut mom = vec![T::zero(); s1 * m];
                let mut tk = vec![T::zero(); m];
                for s in 0..s1 {
                    let row = &mut mom[s * m..(s + 1) * m];
                    for v in s * n..(s + 1) * n {
                        chebyshev_values(t[v], &mut tk);
                        let xv = x[v];
                        for k in 0..m {
                            row[k] = row[k] + tk[k] * xv;
                        }
                    }
                }
                for b in 0..n {
                    let c = &coeffs[b * m..(b + 1) * m];
                    for s in 0..s1 {
                        let row = &mom[s * m..(s + 1) * m];
                        let mut acc = T::zero();
                        for k in 0..m {
                            acc = acc + c[k] * row[k];
                        }
                        out[b * s1 + s] = acc;
                    }
                }
            }
        }
    }

    /// (x M)(v) = Σ_u x(u) M[u→v].
    pub fn apply_transpose(&self, x: &[T], out: &mut [T]) {
        let n = self.cap as usize;
        let s1 = self.states / n;
        match &self.backend {
            Backend::Dense { w } => {
                for o in out.iter_mut() {
                    *o = T::zero();
                }
                for b in 0..n {
                    let wb = &w[b * self.states..(b + 1) * self.states];
                    let xb = &x[b * s1..(b + 1) * s1];
                    for v in 0..self.states {
                        out[v] = out[v] + xb[v / n] * wb[v];
                    }
                }
            }
            Backend::Kernel { coeffs, m, t } => {
                let m = *m;
                let mut nu = vec![T::zero(); s1 * m];
                for b in 0..n {
                    let c = &coeffs[b * m..(b + 1) * m];
                    for p in 0..s1 {
                        let xb = x[b * s1 + p];
                        let row = &mut nu[p * m..(p + 1) * m];
                        for k in 0..m {
                            row[k] = row[k] + c[k] * xb;
                        }
                    }
                }
                for v in 0..self.states {
                    out[v] = clenshaw(t[v], &nu[(v / n) * m..(v / n + 1) * m]);
                }
            }
        }
    }

    /// Leading eigenvalue and its right (or left) eigenvector, normalized to sum 1.
    pub fn perron(&self, left: bool, tol: T, max_iter: usize) -> Result<PerronVector<T>> {
        let mut x = vec![T::one() / T::from_usize_lossy(self.states); self.states];
        let mut y = vec![T::zero(); self.states];
        let mut lambda = T::zero();
        for it in 1..=max_iter {
            if left {
                self.apply_transpose(&x, &mut y);
            } else {
                self.apply(&x, &mut y);
            }
            let s: T = y.iter().copied().sum();
            if !(s > T::zero()) || !s.is_finite() {
                return Err(Error::Numeric(format!("transfer product has sum {s}")));
            }
            let mut diff = T::zero();
            for (a, b) in x.iter_mut().zip(&y) {
                let nb = *b / s;
                diff = diff + (nb - *a).abs();
                *a = nb;
            }
            let dl = (s - lambda).abs();
            lambda = s;
            if diff < tol && dl <= tol * lambda {
                if left {
                    self.apply_transpose(&x, &mut y);
                } else {
                    self.apply(&x, &mut y);
                }
                let scale = x.iter().copied().fold(T::zero(), T::max);
                let residual = x
                    .iter()
                    .zip(&y)
                    .map(|(&a, &b)| (b - lambda * a).abs())
                    .fold(T::zero(), T::max)
                    / (lambda * scale);
                return Ok(PerronVector {
                    eigenvalue: lambda,
                    vector: x,
                    iterations: it,
                    residual,
                });
            }
        }
        Err(Error::Numeric(format!("power iteration did not converge in {max_iter} steps")))
    }
}

/// Output of the power iteration.
#[derive(Clone, Debug)]
pub struct PerronVector<T> {
    pub eigenvalue: T,
    pub vector: Vec<T>,
    pub iterations: usize,
    /// max |Mx − λx| / (λ max x).
    pub residual: T,
}

fn dense_backend<T: Real, P: Potential<T> + ?Sized>(phi: &P, cap: Digit, depth: usize, states: usize) -> Result<Backend<T>> {
    let total = states
        .checked_mul(cap as usize)
        .filter(|&t| t <= DENSE_LIMIT)
        .ok_or_else(|| Error::InvalidInput(format!("dense transfer matrix at N={cap}, d={depth} is too large")))?;
    let mut w = vec![T::zero(); total];
    let mut word: Vec<Digit> = Vec::with_capacity(depth + 1);
    let mut v = Vec::with_capacity(depth);
    for vi in 0..states {
        word_at(vi, depth, cap, &mut v);
        word.clear();
        word.push(1);
        word.extend_from_slice(&v);
        for b in 1..=cap {
            word[0] = b;
            let val = phi.eval(&word);
            if val.is_nan() || val == T::infinity() {
                return Err(Error::Numeric(format!("potential {} is not finite on {:?}", phi.id(), word)));
            }
            w[(b - 1) as usize * states + vi] = val.exp();
        }
    }
    Ok(Backend::Dense { w })
}

fn kernel_backend<T: Real>(kernel: &dyn SplitKernel<T>, cap: Digit, depth: usize, states: usize) -> Result<Backend<T>> {
    let mut v = Vec::with_capacity(depth);
    let mut ys = Vec::with_capacity(states);
    for vi in 0..states {
        word_at(vi, depth, cap, &mut v);
        ys.push(kernel.coordinate(&v));
    }
    let lo = ys.iter().copied().fold(T::infinity(), T::min);
    let hi = ys.iter().copied().fold(T::neg_infinity(), T::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Numeric("kernel coordinates are not finite".into()));
    }
    let (lo, hi) = if hi - lo < T::c(1e-12) { (lo - T::c(1e-6), hi + T::c(1e-6)) } else { (lo, hi) };
    let half = T::c(0.5);
    let mid = half * (lo + hi);
    let rad = half * (hi - lo);
    let t: Vec<T> = ys.iter().map(|&y| ((y - mid) / rad).max(-T::one()).min(T::one())).collect();
    let tol = T::c(1e-13).max(T::epsilon() * T::c(200.0));
    let checks = 257usize;
    for &m in KERNEL_DEGREES.iter() {
        let mut coeffs = vec![T::zero(); cap as usize * m];
        let mut worst = T::zero();
        let mut tk = vec![T::zero(); m];
        for b in 1..=cap {
            let f = |tt: T| kernel.weight(b, mid + rad * tt);
            let c = chebyshev_fit(f, m);
            for j in 0..checks {
                let tt = T::c(-1.0 + 2.0 * j as f64 / (checks - 1) as f64);
                let exact = f(tt);
                chebyshev_values(tt, &mut tk);
                let approx: T = c.iter().zip(&tk).map(|(&a, &b)| a * b).sum();
                let err = ((approx - exact) / exact).abs();
                if !(err <= worst) {
                    worst = err;
                }
            }
            coeffs[(b - 1) as usize * m..b as usize * m].copy_from_slice(&c);
        }
        if worst <= tol {
            return Ok(Backend::Kernel { coeffs, m, t });
        }
    }
    Err(Error::Numeric("split kernel is not resolved by a degree-64 expansion".into()))
}

/// Chebyshev interpolation coefficients of f on [−1,1] at m first-kind nodes.
fn chebyshev_fit<T: Real>(f: impl Fn(T) -> T, m: usize) -> Vec<T> {
    let pi = std::f64::consts::PI;
    let vals: Vec<T> = (0..m)
        .map(|j| f(T::c((pi * (j as f64 + 0.5) / m as f64).cos())))
        .collect();
    (0..m)
        .map(|k| {
            let s: T = (0..m)
                .map(|j| vals[j] * T::c((pi * k as f64 * (j as f64 + 0.5) / m as f64).cos()))
                .sum();
            let c = s * T::c(2.0 / m as f64);
            if k == 0 {
                c * T::c(0.5)
            } else {
                c
            }
        })
        .collect()
}

fn chebyshev_values<T: Real>(t: T, out: &mut [T]) {
    let m = out.len();
    if m == 0 {
        return;
    }
    out[0] = T::one();
    if m > 1 {
        out[1] = t;
    }
    let two_t = t + t;
    for k in 2..m {
        out[k] = two_t * out[k - 1] - out[k - 2];
    }
}

fn clenshaw<T: Real>(t: T, c: &[T]) -> T {
    let two_t = t + t;
    let mut b1 = T::zero();
    let mut b2 = T::zero();
    for &ck in c.iter().skip(1).rev() {
        let b0 = two_t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_reproduces_smooth_function() {
        let c = chebyshev_fit(|t: f64| 1.0 / (3.0 + t), 24);
        for &t in &[-1.0, -0.3, 0.2, 0.99] {
            assert!((clenshaw(t, &c) - 1.0 / (3.0 + t)).abs() < 1e-14);
            let mut tk = vec![0.0; 24];
            chebyshev_values(t, &mut tk);
            let v: f64 = c.iter().zip(&tk).map(|(a, b)| a * b).sum();
            assert!((v - 1.0 / (3.0 + t)).abs() < 1e-14);
        }
    }
}
