//! Set-valued analysis toolkit for finite-dimensional normed spaces.
//!
//! Convex compact sets are held in vertex representation. The crate computes
//! metric projections and Hausdorff distances under the Euclidean, `l1` and
//! `linf` norms, certifies the geodesic structure of the hyperspace of convex
//! sets, rotundifies polytopes with Klee's radial map, perturbs set-valued
//! nonexpansive maps, and runs successive approximations with branching
//! detection.

// `!(x > 0.0)` rejects NaN along with non-positive values, and index loops
// read naturally in the dense tableau and matrix code.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod hyperspace;
pub mod maps;
pub mod random;
pub mod rotund;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{CompactSet, ConvexPolytope, NormSpec, Point, ProjectionFace};
