use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dimension::beta::EntropyGrid;
use crate::dimension::exponent::ConvergenceExponent;
use crate::dimension::relative::{RelativeEntropyIntegral, RelativeEntropySum};
use crate::error::{invalid, Result};
use crate::measures::CylinderEntropy;
use crate::scalar::Real;

/// Which argument of max{α, β} is attained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Alpha,
    Beta,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Alpha => "alpha",
            Branch::Beta => "beta",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaValue<T> {
    pub value: T,
    pub branch: Branch,
}

/// max{α, β}; ties go to β.
pub fn dimension_formula<T: Real>(alpha: T, beta: T) -> Result<FormulaValue<T>> {
    for (name, v) in [("α", alpha), ("β", beta)] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(invalid(format!("{name} = {v} outside [0,1]")));
        }
    }
    Ok(if alpha > beta {
        FormulaValue { value: alpha, branch: Branch::Alpha }
    } else {
        FormulaValue { value: beta, branch: Branch::Beta }
    })
}

/// Everything that went into one evaluation of dim_ν G_μ = max{α_ν, β(ν|μ)}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub label: String,
    pub alpha: f64,
    /// Where α came from: "fit", "finite-support" or "pinned".
    pub alpha_method: String,
    pub h_mu: f64,
    pub h_mu_defect: f64,
    pub h_rel_sum: Option<f64>,
    pub h_rel_integral: Option<f64>,
    pub h_rel_error_bound: Option<f64>,
    pub beta_grid: Option<f64>,
    pub beta_grid_stable: Option<bool>,
    pub beta_closed: f64,
    pub dimension: f64,
    pub branch: Branch,
    pub h_rel_infinite: bool,
    pub mu_equals_nu: bool,
    /// Caps, depths and other settings, echoed for replay.
    pub settings: BTreeMap<String, String>,
    /// Further named values (for instance a pressure estimate).
    pub extra: BTreeMap<String, f64>,
    pub exponent: Option<ConvergenceExponent<f64>>,
    pub grid: Option<EntropyGrid<f64>>,
    pub integral: Option<RelativeEntropyIntegral<f64>>,
}

/// Inputs for [`DimensionReport::assemble`].
#[derive(Clone, Debug, Default)]
pub struct ReportParts {
    pub label: String,
    pub exponent: Option<ConvergenceExponent<f64>>,
    /// Overrides the fitted α (the value recorded as "pinned").
    pub alpha_pinned: Option<f64>,
    pub h_mu: Option<CylinderEntropy<f64>>,
    pub sum: Option<RelativeEntropySum<f64>>,
    pub integral: Option<RelativeEntropyIntegral<f64>>,
    pub grid: Option<EntropyGrid<f64>>,
    pub mu_equals_nu: bool,
    pub settings: BTreeMap<String, String>,
    pub extra: BTreeMap<String, f64>,
}

impl DimensionReport {
    /// β in closed form uses the integral value of h(ν|μ) when present, else the
    /// sum form. μ = ν forces β = 1.
    pub fn assemble(parts: ReportParts) -> Result<Self> {
        let (alpha, alpha_method) = match (parts.alpha_pinned, &parts.exponent) {
            (Some(a), _) => (a, "pinned"),
            (None, Some(e)) if e.finite_support => (e.alpha, "finite-support"),
            (None, Some(e)) => (e.alpha, "fit"),
            (None, None) => return Err(invalid("report needs α")),
        };
        let h = parts.h_mu.ok_or_else(|| invalid("report needs h_μ"))?;
        let h_mu = h.value.max(0.0);
        let infinite = parts.integral.as_ref().is_some_and(|i| i.infinite);
        let h_rel = if infinite {
            f64::INFINITY
        } else if let Some(i) = &parts.integral {
            i.value
        } else if let Some(s) = &parts.sum {
            s.value
        } else {
            return Err(invalid("report needs h(ν|μ)"));
        };
        let beta_closed = if parts.mu_equals_nu && h_mu > 0.0 {
            1.0
        } else {
            super::beta::entropy_dimension_closed(h_mu, h_rel)?
        };
        let f = dimension_formula(alpha, beta_closed)?;
        Ok(DimensionReport {
            label: parts.label,
            alpha,
            alpha_method: alpha_method.to_string(),
            h_mu,
            h_mu_defect: h.defect,
            h_rel_sum: parts.sum.map(|s| s.value),
            h_rel_integral: parts.integral.as_ref().map(|i| i.value),
            h_rel_error_bound: parts.integral.as_ref().map(|i| i.error_bound),
            beta_grid: parts.grid.as_ref().map(|g| g.beta),
            beta_grid_stable: parts.grid.as_ref().map(|g| g.stable),
            beta_closed,
            dimension: f.value,
            branch: f.branch,
            h_rel_infinite: infinite,
            mu_equals_nu: parts.mu_equals_nu,
            settings: parts.settings,
            extra: parts.extra,
            exponent: parts.exponent,
            grid: parts.grid,
            integral: parts.integral,
        })
    }

    /// Flat `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.10}"));
        let _ = writeln!(s, "label = {}", self.label);
        let _ = writeln!(s, "alpha = {:.10}", self.alpha);
        let _ = writeln!(s, "alpha_method = {}", self.alpha_method);
        if let Some(e) = &self.exponent {
            let _ = writeln!(s, "alpha_slope = {:.10}", e.slope);
            let _ = writeln!(s, "alpha_rank = {}", e.rank_max);
        }
        let _ = writeln!(s, "h_mu = {:.10}", self.h_mu);
        let _ = writeln!(s, "h_mu_defect = {:.3e}", self.h_mu_defect);
        let _ = writeln!(s, "h_rel_sum = {}", opt(self.h_rel_sum));
        let _ = writeln!(s, "h_rel_integral = {}", opt(self.h_rel_integral));
        let _ = writeln!(s, "h_rel_error_bound = {}", opt(self.h_rel_error_bound));
        if let Some(i) = &self.integral {
            let _ = writeln!(s, "h_rel_defect = {:.3e}", i.defect);
        }
        let _ = writeln!(s, "h_rel_infinite = {}", self.h_rel_infinite);
        let _ = writeln!(s, "beta_grid = {}", opt(self.beta_grid));
        if let Some(st) = self.beta_grid_stable {
            let _ = writeln!(s, "beta_grid_stable = {st}");
        }
        let _ = writeln!(s, "beta_closed = {:.10}", self.beta_closed);
        let _ = writeln!(s, "mu_equals_nu = {}", self.mu_equals_nu);
        let _ = writeln!(s, "dimension = {:.10}", self.dimension);
        let _ = writeln!(s, "branch = {}", self.branch);
        for (k, v) in &self.extra {
            let _ = writeln!(s, "{k} = {v:.10}");
        }
        for (k, v) in &self.settings {
            let _ = writeln!(s, "setting.{k} = {v}");
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_picks_larger() {
        let f = dimension_formula(0.5f64, 0.5576).unwrap();
        assert_eq!(f.value, 0.5576);
        assert_eq!(f.branch, Branch::Beta);
        let f = dimension_formula(0.5f64, 0.0).unwrap();
        assert_eq!((f.value, f.branch), (0.5, Branch::Alpha));
        assert!(dimension_formula(1.2f64, 0.0).is_err());
    }

    #[test]
    fn report_roundtrip() {
        let parts = ReportParts {
            label: "demo".into(),
            alpha_pinned: Some(0.5),
            h_mu: Some(CylinderEntropy { value: 0.0, defect: 0.0 }),
            sum: Some(RelativeEntropySum { value: 0.96, defect: 0.0, k: 3, cap: 2 }),
            ..Default::default()
        };
        let r = DimensionReport::assemble(parts).unwrap();
        assert_eq!(r.dimension, 0.5);
        assert_eq!(r.branch, Branch::Alpha);
        assert!(r.to_text().contains("dimension = 0.5000000000"));
        let back = DimensionReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
