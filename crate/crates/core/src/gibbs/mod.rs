//! Potentials, truncated transfer operators, pressure and Gibbs measures.

mod model;
mod potential;
mod pressure;
mod transfer;

pub use model::{gibbs_constant_estimate, gibbs_cylinder_mass, GibbsModel, ModelOptions};
pub use potential::{birkhoff_sum, BirkhoffSum, ConstantPotential, LocallyConstant, Potential, ShiftedPotential, SplitKernel};
pub use pressure::{eval_periodic, gurevich_pressure, periodic_sum, PeriodicSum, PressureOptions, PressureReport, TrendPoint};
pub use transfer::{PerronVector, Route, TransferOperator};
