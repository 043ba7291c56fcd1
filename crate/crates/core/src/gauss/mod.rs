//! Continued fractions: coding by the Gauss map, basic intervals, the Gauss
//! measure and the geometric potentials φ_s.

mod cf;
mod dim;
mod measure;
mod potential;
mod wegmann;

pub use cf::{
    basic_interval_length, canonical_point, cf_encode, fold, log_basic_interval_length, periodic_point, CFPoint,
    LogContinuant, DIGIT_GUARD,
};
pub use dim::{dim_generic_cf, CfDimension, CfOptions};
pub use measure::{gauss_measure_mass, GaussMeasure};
pub use potential::{GaussMap, GaussPotential, GeometricPotential, InverseBranches};
pub use wegmann::{f_set_log_digits, wegmann_check, wegmann_check_log, WegmannTrajectory};
