use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::potential::{Potential, ShiftedPotential};
use crate::gibbs::transfer::{Route, TransferOperator};
use crate::scalar::Real;
use crate::symbolic::word::{format_digits, lex_index, word_at};
use crate::symbolic::{CylinderMeasure, Digit};

/// Numerical settings for building a model.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelOptions {
    pub route: Route,
    /// ℓ1 change of the normalized iterate at which power iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            route: Route::Auto,
            tolerance: 1e-14,
            max_iterations: 5000,
        }
    }
}

/// Gibbs measure of a potential on the truncated system Σ_N, represented as the
/// stationary depth-d block chain built from the Perron eigen-data of the
/// transfer matrix.
#[derive(Clone)]
pub struct GibbsModel<T> {
    potential: Arc<dyn Potential<T>>,
    cap: Digit,
    depth: usize,
    pressure: T,
    left: Vec<T>,
    right: Vec<T>,
    cum_pi: Vec<T>,
    residual: T,
    iterations: usize,
    route: Route,
    gibbs_constant: Option<T>,
}

impl<T: Real> GibbsModel<T> {
    pub fn build(potential: Arc<dyn Potential<T>>, cap: Digit, depth: usize, opts: &ModelOptions) -> Result<Self> {
        let op = TransferOperator::build(potential.as_ref(), cap, depth, opts.route)?;
        let tol = T::c(opts.tolerance).max(T::epsilon() * T::c(64.0));
        let r = op.perron(false, tol, opts.max_iterations)?;
        let l = op.perron(true, tol, opts.max_iterations)?;
        let lambda = r.eigenvalue;
        if ((l.eigenvalue - lambda) / lambda).abs() > T::c(1e-9).max(tol * T::c(100.0)) {
            return Err(Error::Numeric(format!(
                "left and right Perron roots disagree: {} vs {}",
                l.eigenvalue, lambda
            )));
        }
        let route = op.route();
        Self::from_parts(
            potential,
            cap,
            depth,
            lambda.ln(),
            l.vector,
            r.vector,
            r.residual.max(l.residual),
            r.iterations + l.iterations,
            route,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        potential: Arc<dyn Potential<T>>,
        cap: Digit,
        depth: usize,
        pressure: T,
        left: Vec<T>,
        right: Vec<T>,
        residual: T,
        iterations: usize,
        route: Route,
    ) -> Result<Self> {
        let dot: T = left.iter().zip(&right).map(|(&a, &b)| a * b).sum();
        if !(dot > T::zero()) {
            return Err(Error::Numeric("left and right eigenvectors are orthogonal".into()));
        }
        let k = dot.sqrt();
        let left: Vec<T> = left.into_iter().map(|x| x / k).collect();
        let right: Vec<T> = right.into_iter().map(|x| x / k).collect();
        let mut cum_pi = Vec::with_capacity(left.len() + 1);
        let mut acc = T::zero();
        cum_pi.push(acc);
        for (&a, &b) in left.iter().zip(&right) {
            acc = acc + a * b;
            cum_pi.push(acc);
        }
        Ok(GibbsModel {
            potential,
            cap,
            depth,
            pressure,
            left,
            right,
            cum_pi,
            residual,
            iterations,
            route,
            gibbs_constant: None,
        })
    }

    /// P̂ = ln of the Perron root.
    pub fn pressure(&self) -> T {
        self.pressure
    }
    pub fn cap(&self) -> Digit {
        self.cap
    }
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn potential(&self) -> &Arc<dyn Potential<T>> {
        &self.potential
    }
    pub fn eigen_residual(&self) -> T {
        self.residual
    }
    pub fn iterations(&self) -> usize {
        self.iterations
    }
    pub fn route(&self) -> Route {
        self.route
    }
    pub fn left(&self) -> &[T] {
        &self.left
    }
    pub fn right(&self) -> &[T] {
        &self.right
    }
    pub fn gibbs_constant(&self) -> Option<T> {
        self.gibbs_constant
    }

    /// The potential φ − P̂, whose pressure on the truncated system is zero.
    pub fn normalized_potential(&self) -> ShiftedPotential<T> {
        ShiftedPotential::new(self.potential.clone(), -self.pressure)
    }

    /// Stationary mass of the block with the given lexicographic index.
    pub fn block_mass(&self, index: usize) -> T {
        self.left[index] * self.right[index]
    }

    fn window_sum(&self, word: &[Digit]) -> T {
        let d = self.depth;
        (0..word.len() - d).map(|i| self.potential.eval(&word[i..i + d + 1])).sum()
    }

    /// ln ν([ω]) on the truncated system; −∞ for words leaving Σ_N.
    fn log_mass_unchecked(&self, word: &[Digit]) -> T {
        if word.iter().any(|&x| x == 0 || x > self.cap) {
            return T::neg_infinity();
        }
        let d = self.depth;
        if word.len() < d {
            return self.mass_short(word).ln();
        }
        let first = lex_index(&word[..d], self.cap);
        let last = lex_index(&word[word.len() - d..], self.cap);
        let steps = T::from_usize_lossy(word.len() - d);
        self.left[first].ln() + self.right[last].ln() + self.window_sum(word) - steps * self.pressure
    }

    fn mass_short(&self, word: &[Digit]) -> T {
        let span = (self.cap as usize).pow((self.depth - word.len()) as u32);
        let lo = lex_index(word, self.cap) * span;
        (self.cum_pi[lo + span] - self.cum_pi[lo]).max(T::zero())
    }

    /// ν([ω]), rejecting digits above the cap.
    pub fn mass_checked(&self, word: &[Digit]) -> Result<T> {
        if let Some(&x) = word.iter().find(|&&x| x > self.cap) {
            return Err(Error::InvalidInput(format!("digit {x} above cap {}", self.cap)));
        }
        Ok(self.mass(word))
    }

    /// ν([ω]) / exp(S_{|ω|}φ(x_ω) − |ω|P̂).
    pub fn gibbs_ratio(&self, word: &[Digit]) -> T {
        let s = self.potential.birkhoff_value(word);
        (self.log_mass_unchecked(word) - s + T::from_usize_lossy(word.len()) * self.pressure).exp()
    }

    /// Ĉ = max over the sample of max(ratio, 1/ratio); stored on the model.
    pub fn estimate_constant(&mut self, sample: &[Vec<Digit>]) -> T {
        let c = gibbs_constant_estimate(self, sample);
        self.gibbs_constant = Some(c);
        c
    }

    /// Draws n digits from the induced stationary block chain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Digit> {
        let d = self.depth;
        let total = *self.cum_pi.last().unwrap();
        let u = T::c(rng.gen::<f64>()) * total;
        let idx = match self.cum_pi.binary_search_by(|p| p.partial_cmp(&u).unwrap()) {
            Ok(i) => i.min(self.left.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.left.len() - 1),
        };
        let mut out = Vec::with_capacity(n.max(d));
        word_at(idx, d, self.cap, &mut out);
        let mut weights = Vec::with_capacity(self.cap as usize);
        let mut window: Vec<Digit> = Vec::with_capacity(d + 1);
        while out.len() < n {
            let tail = &out[out.len() - d..];
            let cur = lex_index(tail, self.cap);
            window.clear();
            window.extend_from_slice(tail);
            window.push(1);
            weights.clear();
            let mut acc = 0.0;
            for a in 1..=self.cap {
                *window.last_mut().unwrap() = a;
                let next = lex_index(&window[1..], self.cap);
                let w = (self.potential.eval(&window) - self.pressure).exp() * self.right[next] / self.right[cur];
                acc += w.as_f64();
                weights.push(acc);
            }
            let u = rng.gen::<f64>() * acc;
            let a = weights.iter().position(|&c| u < c).unwrap_or(weights.len() - 1) as Digit + 1;
            out.push(a);
        }
        out.truncate(n);
        out
    }

    /// Structured text with potential id, N, d, P̂ and both eigenvectors in
    /// round-trip precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "gibbs-model");
        let _ = writeln!(out, "potential {}", self.potential.id());
        let _ = writeln!(out, "N {}", self.cap);
        let _ = writeln!(out, "d {}", self.depth);
        let _ = writeln!(out, "pressure {}", self.pressure);
        let _ = writeln!(out, "residual {}", self.residual);
        let _ = writeln!(out, "route {}", serde_json::to_string(&self.route).unwrap_or_default().trim_matches('"'));
        if let Some(c) = self.gibbs_constant {
            let _ = writeln!(out, "gibbs_constant {c}");
        }
        let _ = writeln!(out, "block\tleft\tright");
        let mut buf = Vec::new();
        for i in 0..self.left.len() {
            word_at(i, self.depth, self.cap, &mut buf);
            let _ = writeln!(out, "{}\t{}\t{}", format_digits(&buf), self.left[i], self.right[i]);
        }
        out
    }

    /// Rebuilds a model from [`GibbsModel::to_text`] output; the potential must
    /// carry the recorded identifier.
    pub fn from_text(text: &str, potential: Arc<dyn Potential<T>>) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("gibbs model: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next() != Some("gibbs-model") {
            return Err(bad("missing magic line".into()));
        }
        let mut field = |key: &str| -> Result<String> {
            let l = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            l.strip_prefix(key)
                .map(|s| s.trim().to_string())
                .ok_or_else(|| bad(format!("expected {key}, got {l:?}")))
        };
        let id = field("potential")?;
        if id != potential.id() {
            return Err(bad(format!("potential id {id:?} does not match {:?}", potential.id())));
        }
        let num = |s: String| s.parse::<f64>().map_err(|e| bad(e.to_string()));
        let cap: Digit = field("N")?.parse().map_err(|_| bad("N".into()))?;
        let depth: usize = field("d")?.parse().map_err(|_| bad("d".into()))?;
        let pressure = T::c(num(field("pressure")?)?);
        let residual = T::c(num(field("residual")?)?);
        let route: Route = serde_json::from_str(&format!("\"{}\"", field("route")?)).map_err(|e| bad(e.to_string()))?;
        let rest: Vec<&str> = lines.collect();
        let mut idx = 0;
        let mut gibbs_constant = None;
        if let Some(c) = rest.first().and_then(|l| l.strip_prefix("gibbs_constant ")) {
            gibbs_constant = Some(T::c(num(c.to_string())?));
            idx = 1;
        }
        let states = (cap as usize).pow(depth as u32);
        let rows = &rest[idx + 1..];
        if rows.len() != states {
            return Err(bad(format!("expected {states} blocks, got {}", rows.len())));
        }
        let mut left = Vec::with_capacity(states);
        let mut right = Vec::with_capacity(states);
        for row in rows {
            let cols: Vec<&str> = row.split('\t').collect();
            if cols.len() != 3 {
                return Err(bad(format!("bad row {row:?}")));
            }
            left.push(T::c(num(cols[1].to_string())?));
            right.push(T::c(num(cols[2].to_string())?));
        }
        let mut m = Self::from_parts(potential, cap, depth, pressure, left, right, residual, 0, route)?;
        m.gibbs_constant = gibbs_constant;
        Ok(m)
    }
}

impl<T: Real> CylinderMeasure<T> for GibbsModel<T> {
    fn mass(&self, word: &[Digit]) -> T {
        if word.is_empty() {
            return T::one();
        }
        if word.iter().any(|&x| x == 0 || x > self.cap) {
            return T::zero();
        }
        if word.len() < self.depth {
            return self.mass_short(word);
        }
        self.log_mass_unchecked(word).exp()
    }

    fn log_mass(&self, word: &[Digit]) -> T {
        if word.is_empty() {
            return T::zero();
        }
        self.log_mass_unchecked(word)
    }

    fn support_cap(&self) -> Option<Digit> {
        Some(self.cap)
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        out.clear();
        let d = self.depth;
        if word.len() < d || word.iter().any(|&x| x == 0 || x > self.cap) {
            let mut buf = word.to_vec();
            buf.push(1);
            for a in 1..=cap {
                *buf.last_mut().unwrap() = a;
                out.push(self.mass(&buf));
            }
            return;
        }
        let m = self.mass(word);
        let tail = &word[word.len() - d..];
        let cur = self.right[lex_index(tail, self.cap)];
        let mut window: Vec<Digit> = tail.to_vec();
        window.push(1);
        for a in 1..=cap {
            if a > self.cap || m == T::zero() {
                out.push(T::zero());
                continue;
            }
            *window.last_mut().unwrap() = a;
            let next = self.right[lex_index(&window[1..], self.cap)];
            out.push(m * (self.potential.eval(&window) - self.pressure).exp() * next / cur);
        }
    }

    fn describe(&self) -> String {
        format!("gibbs({}, N={}, d={})", self.potential.id(), self.cap, self.depth)
    }
}

/// Ĉ = max over the sample of max(ratio, 1/ratio), ratio = ν([ω]) / exp(S_nφ − nP̂).
pub fn gibbs_constant_estimate<T: Real>(model: &GibbsModel<T>, sample: &[Vec<Digit>]) -> T {
    sample
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| {
            let r = model.gibbs_ratio(w);
            r.max(T::one() / r)
        })
        .fold(T::one(), T::max)
}

/// ν([ω]) with an error for digits above the model's cap.
pub fn gibbs_cylinder_mass<T: Real>(model: &GibbsModel<T>, word: &[Digit]) -> Result<T> {
    model.mass_checked(word)
}
