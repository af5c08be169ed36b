//! Continuity of metric projections at rotund sets.

use serde::{Deserialize, Serialize};

use super::{project_rotund, RotundSet};
use crate::geometry::{project_point, ProjectionOptions};
use crate::random::{point_in_ball, rng};
use crate::{ConvexPolytope, Error, NormSpec, Point, Result};

/// `max_k |z_k - P_C x|` over the second half of the sequences, where `z_k`
/// is the selected nearest point of `C_k` to `x_k`.
pub fn projection_stability(
    c_seq: &[ConvexPolytope],
    c_limit: &RotundSet,
    x_seq: &[Point],
    x_limit: &Point,
    norm: NormSpec,
) -> Result<f64> {
    if c_seq.len() != x_seq.len() {
        return Err(Error::Precondition("sequences differ in length".into()));
    }
    if c_seq.is_empty() {
        return Err(Error::Empty("set sequence"));
    }
    let opts = ProjectionOptions::default();
    let target = project_rotund(c_limit, x_limit, norm, &opts)?.witness;
    let mut worst = 0.0f64;
    for (c, x) in c_seq.iter().zip(x_seq).skip(c_seq.len() / 2) {
        let z = project_point(c, x, norm, &opts)?.witness;
        worst = worst.max(z.dist(&target, norm));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Random pairs `(K, y)` drawn per candidate `delta`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions { samples: 50, seed: 0 }
    }
}

/// Halving search for `delta` such that every sampled convex `K` with
/// `h(K, C) < delta` and point `y` with `|y - x| < delta` has
/// `h(P_K y, {P_C x}) < eps` and `diam P_K y <= 1 / n`.
///
/// Candidates are `eps / 2, eps / 4, ...`. Each `K` jitters every vertex of
/// the inscribed approximation of `C` by at most `0.9 (delta - approx_tol)`,
/// which keeps `h(K, C) < delta` without a rejection step. The result is a
/// sampled certificate, not a proof.
pub fn stability_delta_search(
    c: &RotundSet,
    x: &Point,
    eps: f64,
    n: usize,
    norm: NormSpec,
    opts: &StabilityOptions,
) -> Result<f64> {
    check_args(eps, n, opts)?;
    x.check_dim(c.dim())?;
    let target = project_rotund(c, x, norm, &ProjectionOptions::default())?.witness;
    delta_search(c.approx(), c.approx_tol(), x, &target, eps, n, norm, opts)
}

/// The same search around a polytope `P`: sampled `K` with `h(K, P) < delta`
/// and `y` with `|y - x| < delta` must satisfy `h(P_K y, {target}) < eps` and
/// `diam P_K y <= 1 / n`.
pub fn polytope_stability_delta(
    p: &ConvexPolytope,
    x: &Point,
    target: &Point,
    eps: f64,
    n: usize,
    norm: NormSpec,
    opts: &StabilityOptions,
) -> Result<f64> {
    check_args(eps, n, opts)?;
    x.check_dim(p.dim())?;
    target.check_dim(p.dim())?;
    delta_search(p, 0.0, x, target, eps, n, norm, opts)
}

fn check_args(eps: f64, n: usize, opts: &StabilityOptions) -> Result<()> {
    if !(eps > 0.0) || n == 0 || opts.samples == 0 {
        return Err(Error::OutOfRange("eps, n and samples must be positive".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn delta_search(
    p: &ConvexPolytope,
    slack: f64,
    x: &Point,
    target: &Point,
    eps: f64,
    n: usize,
    norm: NormSpec,
    opts: &StabilityOptions,
) -> Result<f64> {
    let popts = ProjectionOptions::default();
    let max_face = 1.0 / n as f64;
    let mut delta = eps / 2.0;
    let mut level = 0u64;
    while delta >= 1e-14 {
        let jitter = 0.9 * (delta - slack);
        if jitter <= 0.0 {
            break;
        }
        let mut r = rng(opts.seed ^ level.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut ok = true;
        for _ in 0..opts.samples {
            let moved: Vec<Point> = p.vertices().iter().map(|v| point_in_ball(&mut r, v, jitter, norm)).collect();
            let k = ConvexPolytope::new(&moved)?;
            let y = point_in_ball(&mut r, x, delta, norm);
            let face = project_point(&k, &y, norm, &popts)?;
            let far = face.face_samples.iter().map(|s| s.dist(target, norm)).fold(0.0, f64::max);
            if far >= eps || face.face_diameter > max_face {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(delta);
        }
        delta *= 0.5;
        level += 1;
    }
    Err(Error::Degenerate(format!(
        "no delta accepted down to {delta:e} (approximation gap {slack:e})"
    )))
}
