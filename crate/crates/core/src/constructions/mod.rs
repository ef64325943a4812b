//! Builders for segment configurations, spreads, bricks and lazy
//! descriptors of countable configurations.

mod brick;
mod descriptor;
mod gamma;
pub mod labels;
mod segment;
mod spread;

pub use brick::{brick_points, BrickSpec, MAX_BRICK_DIM};
pub use descriptor::{materialize, ConfigDescriptor};
pub use gamma::{choose_gamma, difference_set, separation, GammaChoice, SternBrocot};
pub use segment::{all_pairs, check_pair, predicted_sq_distance, segment_config_points, Pair, SegmentSpec};
pub use spread::{spread_points, SpreadSpec, MAX_SPREAD_POINTS};
