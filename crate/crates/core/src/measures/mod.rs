//! Concrete shift-invariant measures, their entropies, and Markov approximation.

mod approx;
mod bernoulli;
mod entropy;
mod hidden;
mod markov;
mod mixture;
mod periodic;
mod table;

pub use approx::markov_approximation;
pub use bernoulli::{Bernoulli, InverseSquare};
pub use entropy::{block_entropy, conditional_entropy, entropy_cylinder, entropy_markov, CylinderEntropy};
pub use hidden::HiddenMarkovMeasure;
pub use markov::MarkovMeasure;
pub use mixture::Mixture;
pub use periodic::PeriodicOrbitMeasure;
pub use table::CylinderTable;
