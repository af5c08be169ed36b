//! Successive approximations, branching detection and the genericity
//! construction.

mod genericity;
mod induction;
mod trajectory;

pub use genericity::{
    an_membership_sample, first_step_matches, genericity_construct, genericity_construct_with, GenericityCertificate,
    MembershipSample,
};
pub use induction::{
    backward_induction, forward_induction, perturbation_radii, rotund_limit_projection, BackwardInduction, ForwardInduction,
    InductionOptions, Stage, CAUCHY_TOL,
};
pub use trajectory::{
    run_trajectory, step, Trajectory, TrajectoryStatus, TrajectoryStep, DEFAULT_BRANCH_TOL, DEFAULT_FIX_TOL,
    DEFAULT_MAX_ITER,
};
