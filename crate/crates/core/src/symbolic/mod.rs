//! Words over ℕ, cylinder weights, the weak-star metric d* and orbit measures.

pub mod cylinder;
pub mod metric;
pub mod orbit;
pub mod stream;
pub mod weights;
pub mod word;

pub use cylinder::{for_each_positive, walk_words, CylinderMeasure};
pub use metric::{d_star, d_star_orbit, Distance};
pub use orbit::{accumulate_orbit, OrbitAccumulator, OrbitMeasure};
pub use stream::{DigitSource, Finite, Periodic};
pub use weights::weight;
pub use word::{Digit, Word};
