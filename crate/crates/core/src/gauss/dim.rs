use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dimension::{
    potential_exponent, relative_entropy_integral, relative_entropy_integral_with, DimensionReport, IntegralOptions,
    ReportParts,
};
use crate::error::Result;
use crate::gauss::potential::GaussPotential;
use crate::gibbs::{GibbsModel, ModelOptions, Potential};
use crate::measures::conditional_entropy;
use crate::symbolic::{CylinderMeasure, Digit};

/// Caps for [`dim_generic_cf`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CfOptions {
    /// Alphabet cap N of the Gibbs model and of the integral.
    pub cap: Digit,
    /// Block depth d of the Gibbs model (used when s ≠ 1).
    pub depth: usize,
    /// Word length k of the integral.
    pub k: usize,
    /// h_ℓ = H_k − H_{k−1} at this k and cap.
    pub entropy_k: usize,
    pub entropy_cap: Digit,
    /// Rank for the α fit.
    pub rank: usize,
    pub model: ModelOptions,
    pub integral: IntegralOptions,
}

impl Default for CfOptions {
    fn default() -> Self {
        CfOptions {
            cap: 1000,
            depth: 2,
            k: 2,
            entropy_k: 2,
            entropy_cap: 10_000,
            rank: 100_000,
            model: ModelOptions::default(),
            integral: IntegralOptions::default(),
        }
    }
}

/// Billingsley dimension of G_ℓ with respect to η_s, and for s = 1 the
/// Euclidean (Hausdorff) dimension as well.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CfDimension {
    pub s: f64,
    pub report: DimensionReport,
    pub euclidean: Option<DimensionReport>,
}

/// dim_{η_s} G_ℓ = max{α_s, h_ℓ/(P_{φ_s} − 2s∫ln x dℓ)}.
///
/// For s = 1 the exact values P = 0 and α_1 = 1/2 are used (the fitted α is kept
/// in `extra` as `alpha_fit`) and no Gibbs model is built. For other s, α and P
/// come from the fit and from the Gibbs model at the caps. An integral flagged
/// infinite sends the result to the α branch.
pub fn dim_generic_cf<M>(ell: &M, s: f64, opts: &CfOptions) -> Result<CfDimension>
where
    M: CylinderMeasure<f64> + ?Sized,
{
    let phi: Arc<dyn Potential<f64>> = Arc::new(GaussPotential::gauss(s)?);
    let exact = s == 1.0;
    let model = if exact {
        None
    } else {
        Some(GibbsModel::build(phi.clone(), opts.cap, opts.depth, &opts.model)?)
    };
    let pressure = model.as_ref().map_or(0.0, |m| m.pressure());
    let exponent = potential_exponent(phi.as_ref(), pressure, opts.rank)?;
    let h = conditional_entropy(ell, opts.entropy_k, opts.entropy_cap)?;
    let integral = match &model {
        None => relative_entropy_integral_with(phi.as_ref(), 0.0, ell, opts.k, opts.cap, &opts.integral)?,
        Some(m) => relative_entropy_integral(m, ell, opts.k, &opts.integral)?,
    };

    let mut settings = BTreeMap::new();
    settings.insert("s".into(), s.to_string());
    settings.insert("N".into(), opts.cap.to_string());
    settings.insert("d".into(), opts.depth.to_string());
    settings.insert("k".into(), opts.k.to_string());
    settings.insert("entropy_k".into(), opts.entropy_k.to_string());
    settings.insert("entropy_cap".into(), opts.entropy_cap.to_string());
    settings.insert("rank".into(), opts.rank.to_string());
    settings.insert("measure".into(), ell.describe());
    let mut extra = BTreeMap::new();
    extra.insert("pressure".into(), pressure);
    extra.insert("alpha_fit".into(), exponent.alpha);
    extra.insert("h_rel_last".into(), integral.last);

    let parts = ReportParts {
        label: format!("cf(s={s})"),
        alpha_pinned: exact.then_some(0.5),
        exponent: Some(exponent),
        h_mu: Some(h),
        integral: Some(integral),
        settings,
        extra,
        ..Default::default()
    };
    let report = DimensionReport::assemble(parts)?;
    let euclidean = exact.then(|| {
        let mut e = report.clone();
        e.label = "cf-euclidean".into();
        e.settings.insert("variant".into(), "euclidean".into());
        e
    });
    Ok(CfDimension { s, report, euclidean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{MarkovMeasure, PeriodicOrbitMeasure};

    fn small() -> CfOptions {
        CfOptions { cap: 200, entropy_cap: 200, rank: 20_000, ..Default::default() }
    }

    #[test]
    fn golden_point_gives_one_half() {
        let ell = PeriodicOrbitMeasure::new(vec![1]).unwrap();
        let d = dim_generic_cf(&ell, 1.0, &small()).unwrap();
        assert_eq!(d.report.h_mu, 0.0);
        assert_eq!(d.report.dimension, 0.5);
        assert_eq!(d.euclidean.unwrap().dimension, 0.5);
    }

    #[test]
    fn markov_on_two_digits() {
        let ell = MarkovMeasure::<f64>::order_one(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let opts = CfOptions { k: 8, ..small() };
        let d = dim_generic_cf(&ell, 1.0, &opts).unwrap();
        let r = &d.report;
        // h = π_2 · ln 2 + π_1 · H(.9,.1) with π = (5/6, 1/6)
        let h1 = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        let h = 5.0 / 6.0 * h1 + 1.0 / 6.0 * 2f64.ln();
        assert!((r.h_mu - h).abs() < 1e-12);
        let beta = r.beta_closed;
        assert!((beta - h / r.h_rel_integral.unwrap()).abs() < 1e-12);
        assert_eq!(r.dimension, beta.max(0.5));
    }

    #[test]
    fn other_s_uses_the_model() {
        let ell = PeriodicOrbitMeasure::new(vec![2]).unwrap();
        let d = dim_generic_cf(&ell, 1.5, &small()).unwrap();
        assert!(d.euclidean.is_none());
        assert_eq!(d.report.alpha_method, "fit");
        assert!((d.report.alpha - 1.0 / 3.0).abs() < 0.02, "{}", d.report.alpha);
        assert_eq!(d.report.branch, crate::dimension::Branch::Alpha);
    }
}
