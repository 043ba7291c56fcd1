use std::sync::Arc;

use genpoint::gauss::{GaussMeasure, GaussPotential};
use genpoint::gibbs::{LocallyConstant, Potential};
use genpoint::measures::{Bernoulli, InverseSquare, MarkovMeasure, PeriodicOrbitMeasure};
use genpoint::symbolic::word::parse_digits;
use genpoint::symbolic::CylinderMeasure;

use crate::CliError;

pub type Measure = Arc<dyn CylinderMeasure<f64>>;

fn bad(spec: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("bad spec {spec:?}: {why}"))
}

fn numbers(spec: &str, list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(spec, format!("{t:?} is not a number"))))
        .collect()
}

/// `bernoulli:p1,..`, `markov:r1;r2;..` (rows of comma-separated transition
/// probabilities), `periodic:w` (comma-separated digits),
/// `gauss` or `inverse-square`.
pub fn measure(spec: &str) -> Result<Measure, CliError> {
    let spec = spec.trim();
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    let lib = |e: genpoint::Error| bad(spec, e);
    Ok(match head {
        "gauss" if body.is_empty() => Arc::new(GaussMeasure),
        "inverse-square" if body.is_empty() => Arc::new(InverseSquare),
        "bernoulli" => Arc::new(Bernoulli::new(numbers(spec, body)?).map_err(lib)?),
        "markov" => {
            let rows = body.split(';').map(|r| numbers(spec, r)).collect::<Result<Vec<_>, _>>()?;
            Arc::new(MarkovMeasure::order_one(&rows).map_err(lib)?)
        }
        "periodic" => Arc::new(PeriodicOrbitMeasure::new(parse_digits(body).map_err(lib)?).map_err(lib)?),
        _ => return Err(bad(spec, "unknown measure")),
    })
}

/// A potential together with its natural alphabet, if finite.
pub struct PotentialSpec {
    pub phi: Arc<dyn Potential<f64>>,
    pub alphabet: Option<u32>,
}

/// `gauss` (exponent s) or `bernoulli:p1,..` for φ = ln p_{x_1}.
pub fn potential(spec: &str, s: f64) -> Result<PotentialSpec, CliError> {
    let spec = spec.trim();
    let lib = |e: genpoint::Error| bad(spec, e);
    if spec == "gauss" {
        return Ok(PotentialSpec { phi: Arc::new(GaussPotential::gauss(s).map_err(lib)?), alphabet: None });
    }
    match spec.split_once(':') {
        Some(("bernoulli", body)) => {
            let p = numbers(spec, body)?;
            let n = p.len() as u32;
            Ok(PotentialSpec { phi: Arc::new(LocallyConstant::log_weights(&p).map_err(lib)?), alphabet: Some(n) })
        }
        _ => Err(bad(spec, "unknown potential")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!(measure("bernoulli:.5,.3,.2").unwrap().support_cap(), Some(3));
        assert_eq!(measure("markov:.9,.1;.5,.5").unwrap().support_cap(), Some(2));
        assert!((measure("periodic:1,2").unwrap().mass(&[1, 2]) - 0.5).abs() < 1e-15);
        assert_eq!(measure("gauss").unwrap().support_cap(), None);
        assert!(potential("bernoulli:.5,.5", 1.0).unwrap().alphabet == Some(2));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["bernoulli:.5,x", "bernoulli:.5,.6", "markov:.5,.5;1", "periodic:", "gauss:1", "cauchy"] {
            assert!(matches!(measure(s), Err(CliError::Config(_))), "{s}");
        }
        assert!(potential("gauss", 0.4).is_err());
        assert!(potential("bernoulli", 1.0).is_err());
    }
}
