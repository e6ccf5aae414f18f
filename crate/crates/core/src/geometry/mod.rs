//! Space-time points, the parabolic metric, scaling maps and oriented
//! simplicial chains standing in for integral currents.

mod boxes;
mod chain;
mod point;

pub use boxes::kuhn_box;
pub use chain::{simplex_volume, PolyhedralChain, Simplex};
pub use point::{apply_scaling, par_dist, ScalingKind, ScalingMap, SpaceTimePoint};
