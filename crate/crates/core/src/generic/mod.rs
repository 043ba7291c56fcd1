//! Generic points: seeds under digit caps, typical-word sampling, Cantor
//! samplers for the lower bound sets, and convergence checks.

mod cantor;
pub mod rng;
mod seed;
mod typical;
mod verify;

pub use cantor::{sample_f, sample_ystar, CantorMeasure, FSample, FzParams, ProductBlockMeasure, RankTable, YStar};
pub use seed::{
    build_seed, export_stream, first_cap_violation, import_stream, level_measures, Caps, GenericPoint, SeedLevel,
    SeedOptions, SeedSchedule,
};
pub use typical::{check_depth, threshold_length, typical_word, TypicalOptions, TypicalWord, WordTest};
pub use verify::{verify_generic, Trajectory};
