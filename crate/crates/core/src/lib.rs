//! Parabolic geometric measure theory lab.
//!
//! Space-time chains, grid estimates of parabolic Hausdorff content,
//! co-area and area formula checks, curve shortening flow with extinction
//! bounds, Gaussian density monotonicity, space-time tracks and
//! rotationally symmetric translators of the weighted area functional.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coarea;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod measure;
pub mod monotonicity;
pub mod quadrature;
pub mod report;
pub mod track;
pub mod translator;

pub use error::{Error, Result};
pub use geometry::{
    apply_scaling, par_dist, PolyhedralChain, ScalingKind, ScalingMap, Simplex, SpaceTimePoint,
};
