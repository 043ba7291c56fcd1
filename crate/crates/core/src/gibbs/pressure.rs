use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gibbs::model::{GibbsModel, ModelOptions};
use crate::gibbs::potential::Potential;
use crate::scalar::{log_sum_exp, Real};
use crate::symbolic::word::word_at;
use crate::symbolic::Digit;

/// Pressure at one truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint<T> {
    pub cap: Digit,
    pub depth: usize,
    pub pressure: T,
}

/// (1/n) ln Σ over period-n points with digits ≤ cap of exp S_nφ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSum<T> {
    pub period: usize,
    pub cap: Digit,
    pub value: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PressureReport<T> {
    pub potential: String,
    pub cap: Digit,
    pub depth: usize,
    pub pressure: T,
    pub eigen_residual: T,
    pub iterations: usize,
    /// Pressures at smaller caps and depths, in increasing cap order.
    pub trend: Vec<TrendPoint<T>>,
    pub periodic: Vec<PeriodicSum<T>>,
}

/// Settings for the truncation grid and periodic-orbit sums.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PressureOptions {
    pub model: ModelOptions,
    /// Smaller caps for the trend record; empty means N/8, N/4, N/2.
    pub trend_caps: Vec<Digit>,
    /// Include every depth 1..d at each trend cap.
    pub trend_depths: bool,
    /// Largest period for the periodic-orbit sums (at most 8).
    pub max_period: usize,
    /// Number of period words enumerated per period.
    pub periodic_budget: usize,
}

impl Default for PressureOptions {
    fn default() -> Self {
        PressureOptions {
            model: ModelOptions::default(),
            trend_caps: Vec::new(),
            trend_depths: true,
            max_period: 8,
            periodic_budget: 20_000,
        }
    }
}

/// Truncated pressure ln λ(N, d) together with its truncation trend and
/// periodic-orbit cross-check. Returns the model at (N, d) as well.
pub fn gurevich_pressure<T: Real>(
    phi: Arc<dyn Potential<T>>,
    cap: Digit,
    depth: usize,
    opts: &PressureOptions,
) -> Result<(GibbsModel<T>, PressureReport<T>)> {
    let model = GibbsModel::build(phi.clone(), cap, depth, &opts.model)?;
    let mut caps: Vec<Digit> = if opts.trend_caps.is_empty() {
        [8, 4, 2].iter().map(|k| cap / k).filter(|&c| c >= 2).collect()
    } else {
        opts.trend_caps.iter().copied().filter(|&c| c >= 1 && c < cap).collect()
    };
    caps.sort_unstable();
    caps.dedup();
    let mut trend = Vec::new();
    for &c in caps.iter().chain(std::iter::once(&cap)) {
        let depths: Vec<usize> = if opts.trend_depths { (1..=depth).collect() } else { vec![depth] };
        for d in depths {
            if c == cap && d == depth {
                trend.push(TrendPoint { cap, depth, pressure: model.pressure() });
            } else {
                let m = GibbsModel::build(phi.clone(), c, d, &opts.model)?;
                trend.push(TrendPoint { cap: c, depth: d, pressure: m.pressure() });
            }
        }
    }
    let periodic = (1..=opts.max_period.min(8))
        .map(|n| periodic_sum(phi.as_ref(), n, cap, opts.periodic_budget))
        .collect();
    let report = PressureReport {
        potential: phi.id(),
        cap,
        depth,
        pressure: model.pressure(),
        eigen_residual: model.eigen_residual(),
        iterations: model.iterations(),
        trend,
        periodic,
    };
    Ok((model, report))
}

/// φ at the periodic point (w)^∞, evaluated on enough repetitions that the
/// variation left over is negligible.
pub fn eval_periodic<T: Real, P: Potential<T> + ?Sized>(phi: &P, period: &[Digit]) -> T {
    let len = match phi.locally_constant_depth() {
        Some(d) => d.max(period.len()),
        None => {
            let mut m = period.len().max(8);
            while m < 256 && phi.variation(m) > T::epsilon() {
                m += period.len();
            }
            m
        }
    };
    let word: Vec<Digit> = period.iter().copied().cycle().take(len).collect();
    phi.eval(&word)
}

/// (1/n) ln Σ_{w ∈ Σ_M^n} exp S_nφ(w^∞), with M the largest cap ≤ N keeping M^n within budget.
pub fn periodic_sum<T: Real, P: Potential<T> + ?Sized>(phi: &P, n: usize, cap: Digit, budget: usize) -> PeriodicSum<T> {
    let mut m = cap.min(budget.max(2) as Digit);
    while m > 1 && (m as f64).powi(n as i32) > budget as f64 {
        m -= 1;
    }
    let count = (m as usize).pow(n as u32);
    let mut terms = Vec::with_capacity(count);
    let mut w = Vec::with_capacity(n);
    let mut rot = vec![0; n];
    for i in 0..count {
        word_at(i, n, m, &mut w);
        let mut s = T::zero();
        for shift in 0..n {
            for j in 0..n {
                rot[j] = w[(j + shift) % n];
            }
            s = s + eval_periodic(phi, &rot);
        }
        terms.push(s);
    }
    PeriodicSum {
        period: n,
        cap: m,
        value: log_sum_exp(&terms) / T::from_usize_lossy(n),
    }
}
