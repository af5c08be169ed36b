//! Convex-compact-set calculus in `R^d`.

mod hausdorff;
pub mod lp;
mod minnorm;
mod norm;
mod point;
mod polytope;
mod projection;

pub use hausdorff::{distance_to_set, hausdorff, hausdorff_witness, one_sided_excess, HausdorffWitness, Pieces};
pub use minnorm::min_norm_point;
pub use norm::NormSpec;
pub use point::Point;
pub use polytope::{
    diameter, hull_equal, hull_reduce, hull_reduce_lp, minkowski_interp, support, CompactSet,
    ConvexPolytope,
};
pub use projection::{distance, project_point, ProjectionFace, ProjectionOptions};

/// Tolerance for ties in support values and for containment checks.
pub const TIE_TOL: f64 = 1e-9;
