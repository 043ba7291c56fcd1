//! Dimension theory of generic points for shift-invariant measures on ℕ^ℕ.
//!
//! The crate evaluates dim_ν G_μ = max{α_ν, β(ν|μ)} for a Gibbs measure ν and an
//! invariant measure μ, builds explicit generic points of μ under digit caps,
//! and specializes everything to continued fractions under the Gauss map.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimension;
pub mod error;
pub mod gauss;
pub mod generic;
pub mod gibbs;
pub mod measures;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use scalar::Real;
pub use symbolic::{Digit, Word};

// f64 instances of the scalar-generic types.
pub type Bernoulli = measures::Bernoulli<f64>;
pub type Markov = measures::MarkovMeasure<f64>;
pub type Mixture = measures::Mixture<f64>;
pub type Table = measures::CylinderTable<f64>;
pub type Gibbs = gibbs::GibbsModel<f64>;
pub type LocallyConstant = gibbs::LocallyConstant<f64>;
pub type GaussPotential = gauss::GaussPotential<f64>;
pub type Distance = symbolic::Distance<f64>;
pub type ConvergenceExponent = dimension::ConvergenceExponent<f64>;
pub type EntropyGrid = dimension::EntropyGrid<f64>;
pub type RelativeEntropySum = dimension::RelativeEntropySum<f64>;
pub type RelativeEntropyIntegral = dimension::RelativeEntropyIntegral<f64>;
pub type LocalDimension = dimension::LocalDimension<f64>;
