//! Convergence exponent α_ν, relative entropy h(ν|μ), entropy dimension β(ν|μ),
//! the formula max{α, β}, local dimensions and the covering-sum diagnostic.

mod beta;
mod covering;
mod exponent;
mod formula;
mod local;
mod relative;

pub use beta::{entropy_dimension_closed, entropy_dimension_grid, EntropyGrid, CLOSED_SLACK, STABLE_SPREAD};
pub use covering::{covering_sum_diagnostic, CoveringDiagnostic, CoveringMode, CoveringParams};
pub use exponent::{
    convergence_exponent, convergence_exponent_from_log_masses, potential_exponent, ConvergenceExponent, PartialSumTest,
};
pub use formula::{dimension_formula, Branch, DimensionReport, FormulaValue, ReportParts};
pub use local::{geometric_schedule, local_dimension, LocalDimension};
pub use relative::{
    level_integrals, relative_entropy_integral, relative_entropy_integral_with, relative_entropy_sum, CapValue,
    IntegralOptions, RelativeEntropyIntegral, RelativeEntropySum,
};
