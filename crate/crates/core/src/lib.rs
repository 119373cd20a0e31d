//! Numerical laboratory for quasi-isometries of the first Heisenberg group.
//!
//! The crate covers the group and its three distances, isometries in
//! canonical form, sampled mappings with a discrete horizontal calculus,
//! minimax fitting of isometries, John domains with ball chains, and the
//! first-order operator `Q` with its five-dimensional kernel.

pub mod cc;
pub mod experiment;
pub mod error;
pub mod field;
pub mod fit;
pub mod group;
pub mod isometry;
pub mod john;
pub mod operator_q;
pub mod sampling;

pub use error::{Error, Result};
pub use group::{Ball, Metric, Point};
pub use isometry::Isometry;
