//! Point configurations for Euclidean Ramsey constructions.
//!
//! The crate builds the shift-graph segment configurations, spread
//! configurations and bricks, decides negative type and embeds distance
//! matrices, and runs the simplex pipeline that writes a simplex as a
//! concatenation of a brick vertex set and a spread point set.
//!
//! Everything here is `no_std` with `alloc`. File formats and the command
//! line live in the companion `pramsey` crate.

#![no_std]
// `Float` imports go unused when another crate in the build links std.
#![allow(unused_imports)]

extern crate alloc;

pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod geometry;
pub(crate) mod linalg;
pub mod pipeline;
pub mod rational;

pub use error::{Error, Result};
pub use geometry::{CongruenceMap, ExactBlock, ExactCoords, NegativeTypeReport, PointConfig, SquaredDistanceMatrix};
pub use rational::Rational;
