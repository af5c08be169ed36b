//! Metric projection onto a convex polytope and its optimal face.

use std::borrow::Cow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lp::{LinearProgram, LpSolution};
use super::minnorm::min_norm_point;
use super::polytope::diameter;
use super::{ConvexPolytope, NormSpec, Point};
use crate::{Error, Result};

/// Most random probe batches tried while the face diameter keeps growing.
const MAX_PROBE_BATCHES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionOptions {
    /// Duality-gap tolerance for the Euclidean kernel and stabilization
    /// tolerance for face probing.
    pub tol: f64,
    pub max_iter: usize,
    pub probe_seed: u64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            tol: 1e-10,
            max_iter: 100_000,
            probe_seed: 0x5eed,
        }
    }
}

impl ProjectionOptions {
    pub fn with_tol(tol: f64) -> Self {
        ProjectionOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Nearest points of a set to a query point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionFace {
    /// One minimizer.
    pub witness: Point,
    /// Distance from the query point to the set.
    pub value: f64,
    /// Largest pairwise distance among `face_samples`.
    pub face_diameter: f64,
    /// Extreme points of the set of minimizers found by probing.
    pub face_samples: Vec<Point>,
}

impl ProjectionFace {
    fn singleton(witness: Point, value: f64) -> Self {
        ProjectionFace {
            face_samples: vec![witness.clone()],
            witness,
            value,
            face_diameter: 0.0,
        }
    }
}

/// Epigraph LP over convex weights `lambda` on the vertices plus auxiliary
/// variables measuring `|y - x|` for `y = sum lambda_j v_j`.
///
/// Layout: `lambda` (m), then one `t` for `linf` or `d` slacks for `l1`.
fn epigraph_lp(vertices: &[Point], x: &Point, norm: NormSpec) -> LinearProgram {
    let m = vertices.len();
    let d = x.dim();
    let aux = match norm {
        NormSpec::Linf => 1,
        NormSpec::L1 => d,
        NormSpec::Euclidean => unreachable!("Euclidean projection is not an LP"),
    };
    let n = m + aux;
    let mut objective = vec![0.0; n];
    for c in objective[m..].iter_mut() {
        *c = 1.0;
    }
    let mut lp = LinearProgram::new(n).minimize(objective);
    let mut sum = vec![0.0; n];
    sum[..m].fill(1.0);
    lp.add_eq(sum, 1.0);
    for i in 0..d {
        let aux_col = if aux == 1 { m } else { m + i };
        let mut up = vec![0.0; n];
        let mut down = vec![0.0; n];
        for (j, v) in vertices.iter().enumerate() {
            up[j] = v[i];
            down[j] = -v[i];
        }
        up[aux_col] = -1.0;
        down[aux_col] = -1.0;
        lp.add_le(up, x[i]);
        lp.add_le(down, -x[i]);
    }
    lp
}

fn combine(vertices: &[Point], weights: &[f64]) -> Point {
    let d = vertices[0].dim();
    let mut y = vec![0.0; d];
    for (v, w) in vertices.iter().zip(weights) {
        if *w != 0.0 {
            for (yk, vk) in y.iter_mut().zip(v.coords()) {
                *yk += w * vk;
            }
        }
    }
    Point::new(y)
}

/// Simplex failures that only rounding can cause on a bounded, feasible
/// epigraph LP.
fn numerical(e: &Error) -> bool {
    matches!(e, Error::Unbounded | Error::Infeasible | Error::NonConvergence { .. })
}

/// Greedy subset of `vertices` with every dropped point within Euclidean
/// distance `tol` of the hull of those kept. Sub-`tol` features make simplex
/// bases ill-conditioned; the subset's hull lies inside the original and
/// within `tol` of it.
fn coarsen(vertices: &[Point], tol: f64) -> Result<Vec<Point>> {
    let mut kept = vertices.to_vec();
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let p = &kept[i];
        let others: Vec<Vec<f64>> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| (q - p).into_coords())
            .collect();
        let r = min_norm_point(&others, 1e-14, 100_000)?;
        if r.point.iter().map(|c| c * c).sum::<f64>().sqrt() <= tol {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept)
}

fn lp_scale(vertices: &[Point], x: &Point) -> f64 {
    1.0 + x.norm(NormSpec::Linf) + vertices.iter().map(|v| v.norm(NormSpec::Linf)).fold(0.0, f64::max)
}

/// Solves the epigraph LP, retrying on a coarsened vertex set when the
/// simplex breaks down numerically. Returns the vertices actually used.
fn solve_epigraph<'a>(vertices: &'a [Point], x: &Point, norm: NormSpec) -> Result<(Cow<'a, [Point]>, LpSolution)> {
    match epigraph_lp(vertices, x, norm).solve() {
        Ok(s) => Ok((Cow::Borrowed(vertices), s)),
        Err(e) if numerical(&e) => {
            let v = coarsen(vertices, 1e-9 * lp_scale(vertices, x))?;
            let s = epigraph_lp(&v, x, norm).solve()?;
            Ok((Cow::Owned(v), s))
        }
        Err(e) => Err(e),
    }
}

/// Sup-norm distance from `p` to `conv(points)`; the containment oracle.
pub(crate) fn linf_distance_to_hull(points: &[Point], p: &Point) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("point list"));
    }
    if points.iter().any(|q| q == p) {
        return Ok(0.0);
    }
    // every simplex iterate is a convex combination, so a value computed on
    // a vertex subset only overstates the distance
    match solve_epigraph(points, p, NormSpec::Linf) {
        Ok((_, sol)) => Ok(sol.objective.max(0.0)),
        Err(e) if numerical(&e) => {
            let shifted: Vec<Vec<f64>> = points.iter().map(|q| (q - p).into_coords()).collect();
            let r = min_norm_point(&shifted, 1e-14, 100_000)?;
            Ok(r.point.iter().map(|c| c * c).sum::<f64>().sqrt())
        }
        Err(e) => Err(e),
    }
}

fn check(target: &ConvexPolytope, x: &Point) -> Result<()> {
    x.check_dim(target.dim())?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Exact nearest point of a counterclockwise planar polygon, or `None` when
/// the vertex order is not convex counterclockwise.
fn planar_nearest(vs: &[Point], x: &Point) -> Option<(Point, f64)> {
    let cross = |o: &Point, a: &Point, b: &Point| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let n = vs.len();
    let mut outside = n < 3;
    if n >= 3 {
        let scale = vs.iter().map(|v| v.norm(NormSpec::Linf)).fold(0.0, f64::max) + 1.0;
        for i in 0..n {
            if cross(&vs[i], &vs[(i + 1) % n], &vs[(i + 2) % n]) < -1e-12 * scale * scale {
                return None;
            }
            outside |= cross(&vs[i], &vs[(i + 1) % n], x) < 0.0;
        }
    }
    if !outside {
        return Some((x.clone(), 0.0));
    }
    let edges = if n == 2 { 1 } else { n };
    let mut best: Option<(Point, f64)> = None;
    for i in 0..edges {
        let (a, b) = (&vs[i], &vs[(i + 1) % n]);
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len2 = ex * ex + ey * ey;
        let t = if len2 > 0.0 {
            (((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = Point::new(vec![a[0] + t * ex, a[1] + t * ey]);
        let d = q.dist(x, NormSpec::Euclidean);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((q, d));
        }
    }
    best
}

fn euclidean(target: &ConvexPolytope, x: &Point, opts: &ProjectionOptions) -> Result<(Point, f64)> {
    if target.dim() == 2 {
        if let Some(found) = planar_nearest(target.vertices(), x) {
            return Ok(found);
        }
    }
    let shifted: Vec<Vec<f64>> = target
        .vertices()
        .iter()
        .map(|v| (v - x).into_coords())
        .collect();
    let r = min_norm_point(&shifted, opts.tol, opts.max_iter)?;
    let value = r.point.iter().map(|c| c * c).sum::<f64>().sqrt();
    let scale = 1.0 + x.norm(NormSpec::Linf) + target.extent();
    if value <= 1e-14 * scale {
        return Ok((x.clone(), 0.0));
    }
    let witness = &Point::new(r.point) + x;
    Ok((witness, value))
}

/// Distance from `x` to `target` without face probing.
pub fn distance(target: &ConvexPolytope, x: &Point, norm: NormSpec) -> Result<f64> {
    check(target, x)?;
    if target.is_singleton() {
        return Ok(x.dist(&target.vertices()[0], norm));
    }
    if target.vertices().contains(x) {
        return Ok(0.0);
    }
    match norm {
        NormSpec::Euclidean => Ok(euclidean(target, x, &ProjectionOptions::default())?.1),
        _ => Ok(solve_epigraph(target.vertices(), x, norm)?.1.objective.max(0.0)),
    }
}

/// Distance, one nearest point, and an inner approximation of the set of
/// all nearest points.
///
/// The Euclidean norm is strictly convex, so its nearest point is unique.
/// Under `l1`/`linf` the optimal face is probed by maximizing `2d + 4` linear
/// functionals (coordinate directions and seeded random ones) over the
/// optimal set of the epigraph LP, adding random batches until the sampled
/// diameter stops changing.
pub fn project_point(
    target: &ConvexPolytope,
    x: &Point,
    norm: NormSpec,
    opts: &ProjectionOptions,
) -> Result<ProjectionFace> {
    check(target, x)?;
    if !(opts.tol > 0.0) {
        return Err(Error::OutOfRange(format!("tol = {} must be positive", opts.tol)));
    }
    if target.is_singleton() {
        let v = target.vertices()[0].clone();
        let value = x.dist(&v, norm);
        return Ok(ProjectionFace::singleton(v, value));
    }
    if target.vertices().contains(x) {
        return Ok(ProjectionFace::singleton(x.clone(), 0.0));
    }
    if norm == NormSpec::Euclidean {
        let (w, value) = euclidean(target, x, opts)?;
        return Ok(ProjectionFace::singleton(w, value));
    }

    match polyhedral_face(target.vertices(), x, norm, opts) {
        Err(e) if numerical(&e) => {
            let v = coarsen(target.vertices(), 1e-9 * lp_scale(target.vertices(), x))?;
            polyhedral_face(&v, x, norm, opts)
        }
        r => r,
    }
}

fn polyhedral_face(vertices: &[Point], x: &Point, norm: NormSpec, opts: &ProjectionOptions) -> Result<ProjectionFace> {
    let (vertices, sol) = solve_epigraph(vertices, x, norm)?;
    let vertices: &[Point] = &vertices;
    let m = vertices.len();
    let d = x.dim();
    let base = epigraph_lp(vertices, x, norm);
    let value = sol.objective.max(0.0);
    let witness = combine(vertices, &sol.x[..m]);
    let scale = lp_scale(vertices, x);
    if value <= 1e-14 * scale {
        return Ok(ProjectionFace::singleton(x.clone(), 0.0));
    }

    // restrict to the optimal set; the slack absorbs simplex rounding
    let mut face_lp = base.clone();
    face_lp.add_le(base.objective.clone(), value + 1e-11 * scale);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.probe_seed);
    let random_dir = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(2 * d + 4);
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        dirs.push(e.clone());
        e[k] = -1.0;
        dirs.push(e);
    }
    for _ in 0..4 {
        dirs.push(random_dir(&mut rng));
    }

    let mut samples = vec![witness.clone()];
    let probe = |dirs: &[Vec<f64>], samples: &mut Vec<Point>| -> Result<()> {
        for u in dirs {
            let mut c = vec![0.0; face_lp.num_vars];
            for (j, v) in vertices.iter().enumerate() {
                c[j] = -v.coords().iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
            }
            let lp = LinearProgram {
                objective: c,
                ..face_lp.clone()
            };
            let s = lp.solve()?;
            let y = combine(vertices, &s.x[..m]);
            if !samples.iter().any(|p| p.dist(&y, NormSpec::Linf) <= 1e-12 * scale) {
                samples.push(y);
            }
        }
        Ok(())
    };
    probe(&dirs, &mut samples)?;
    let mut diam = diameter(&samples, norm);
    for _ in 0..MAX_PROBE_BATCHES {
        let batch: Vec<Vec<f64>> = (0..2 * d + 4).map(|_| random_dir(&mut rng)).collect();
        probe(&batch, &mut samples)?;
        let next = diameter(&samples, norm);
        let stable = next - diam < opts.tol;
        diam = next;
        if stable {
            break;
        }
    }
    Ok(ProjectionFace {
        witness,
        value,
        face_diameter: diam,
        face_samples: samples,
    })
}
