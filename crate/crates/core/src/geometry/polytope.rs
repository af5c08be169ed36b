use serde::{Deserialize, Serialize};

use super::projection::linf_distance_to_hull;
use super::{NormSpec, Point, TIE_TOL};
use crate::{Error, Result};

/// Nonempty convex polytope in vertex representation.
///
/// The vertex list is irredundant: no vertex lies in the convex hull of the
/// others. Lower-dimensional polytopes (segments, singletons) are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVertices", into = "RawVertices")]
pub struct ConvexPolytope {
    dim: usize,
    vertices: Vec<Point>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawVertices {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<RawVertices> for ConvexPolytope {
    type Error = Error;
    fn try_from(raw: RawVertices) -> Result<Self> {
        let pts = raw
            .vertices
            .into_iter()
            .map(Point::try_new)
            .collect::<Result<Vec<_>>>()?;
        for p in &pts {
            p.check_dim(raw.dim)?;
        }
        hull_reduce(&pts)
    }
}

impl From<ConvexPolytope> for RawVertices {
    fn from(p: ConvexPolytope) -> Self {
        RawVertices {
            dim: p.dim,
            vertices: p.vertices.into_iter().map(Point::into_coords).collect(),
        }
    }
}

impl ConvexPolytope {
    /// Convex hull of `points`, with redundant points removed.
    pub fn new(points: &[Point]) -> Result<Self> {
        hull_reduce(points)
    }

    pub fn singleton(p: Point) -> Self {
        ConvexPolytope {
            dim: p.dim(),
            vertices: vec![p],
        }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cube(lo: &[f64], hi: &[f64]) -> Self {
        let d = lo.len();
        let vertices = (0..1usize << d)
            .map(|mask| {
                Point::new(
                    (0..d)
                        .map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] })
                        .collect(),
                )
            })
            .collect::<Vec<_>>();
        hull_reduce(&vertices).expect("box vertices are nonempty")
    }

    /// Caller guarantees irredundance.
    pub(crate) fn from_vertices_unchecked(dim: usize, vertices: Vec<Point>) -> Self {
        ConvexPolytope { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ck, vk) in c.iter_mut().zip(v.coords()) {
                *ck += vk / n;
            }
        }
        Point::new(c)
    }

    pub fn translate(&self, t: &Point) -> ConvexPolytope {
        ConvexPolytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v + t).collect(),
        }
    }

    /// Homothety `c + s (x - c)`, `s > 0`.
    pub fn scale_about(&self, c: &Point, s: f64) -> ConvexPolytope {
        ConvexPolytope {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| &(&(v - c) * s) + c)
                .collect(),
        }
    }

    /// `p` lies within `tol` (sup-norm) of the polytope.
    pub fn contains(&self, p: &Point, tol: f64) -> Result<bool> {
        p.check_dim(self.dim)?;
        Ok(linf_distance_to_hull(&self.vertices, p)? <= tol)
    }

    /// Every vertex of `other` lies within `tol` of `self`.
    pub fn contains_polytope(&self, other: &ConvexPolytope, tol: f64) -> Result<bool> {
        for v in other.vertices() {
            if !self.contains(v, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest coordinate magnitude; used to scale tolerances.
    pub fn extent(&self) -> f64 {
        self.vertices
            .iter()
            .flat_map(|v| v.coords().iter())
            .fold(0.0, |m: f64, c| m.max(c.abs()))
    }

    /// Affine dimension of the vertex set.
    pub fn affine_rank(&self) -> usize {
        if self.vertices.len() < 2 {
            return 0;
        }
        let base = &self.vertices[0];
        let rows = self.vertices.len() - 1;
        let m = nalgebra::DMatrix::from_fn(rows, self.dim, |i, j| {
            self.vertices[i + 1][j] - base[j]
        });
        let scale = m.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
        m.svd(false, false)
            .singular_values
            .iter()
            .filter(|s| **s > 1e-10 * scale)
            .count()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_rank() == self.dim
    }
}

/// Nonempty compact set, held as a finite union of convex polytopes.
///
/// A finite point cloud is the special case where every piece is a
/// singleton; it serializes as `{"dim", "vertices"}` like a polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCompact", into = "RawCompact")]
pub struct CompactSet {
    dim: usize,
    pieces: Vec<ConvexPolytope>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawCompact {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pieces: Option<Vec<Vec<Vec<f64>>>>,
}

impl TryFrom<RawCompact> for CompactSet {
    type Error = Error;
    fn try_from(raw: RawCompact) -> Result<Self> {
        let mut pieces = Vec::new();
        for v in raw.vertices.unwrap_or_default() {
            let p = Point::try_new(v)?;
            p.check_dim(raw.dim)?;
            pieces.push(ConvexPolytope::singleton(p));
        }
        for piece in raw.pieces.unwrap_or_default() {
            let pts = piece
                .into_iter()
                .map(Point::try_new)
                .collect::<Result<Vec<_>>>()?;
            for p in &pts {
                p.check_dim(raw.dim)?;
            }
            pieces.push(hull_reduce(&pts)?);
        }
        CompactSet::from_pieces(pieces)
    }
}

impl From<CompactSet> for RawCompact {
    fn from(s: CompactSet) -> Self {
        if s.is_point_cloud() {
            RawCompact {
                dim: s.dim,
                vertices: Some(
                    s.pieces
                        .into_iter()
                        .map(|p| p.vertices[0].clone().into_coords())
                        .collect(),
                ),
                pieces: None,
            }
        } else {
            RawCompact {
                dim: s.dim,
                vertices: None,
                pieces: Some(
                    s.pieces
                        .into_iter()
                        .map(|p| p.vertices.into_iter().map(Point::into_coords).collect())
                        .collect(),
                ),
            }
        }
    }
}

impl CompactSet {
    pub fn from_points(points: &[Point]) -> Result<Self> {
        CompactSet::from_pieces(points.iter().cloned().map(ConvexPolytope::singleton).collect())
    }

    pub fn from_pieces(pieces: Vec<ConvexPolytope>) -> Result<Self> {
        let first = pieces.first().ok_or(Error::Empty("compact set"))?;
        let dim = first.dim();
        for p in &pieces {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(CompactSet { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[ConvexPolytope] {
        &self.pieces
    }

    pub fn is_point_cloud(&self) -> bool {
        self.pieces.iter().all(ConvexPolytope::is_singleton)
    }

    /// All piece vertices; for a point cloud, the points themselves.
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.pieces.iter().flat_map(|p| p.vertices.iter())
    }
}

impl From<ConvexPolytope> for CompactSet {
    fn from(p: ConvexPolytope) -> Self {
        CompactSet {
            dim: p.dim(),
            pieces: vec![p],
        }
    }
}

fn dedup_points(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b, 0.0));
    pts.dedup_by(|a, b| a == b);
    pts
}

fn check_points(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or(Error::Empty("point list"))?;
    let dim = first.dim();
    for p in points {
        p.check_dim(dim)?;
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Ok(dim)
}

/// Convex hull vertices of `points`.
///
/// Planar inputs use a monotone chain; other dimensions fall back to
/// [`hull_reduce_lp`].
pub fn hull_reduce(points: &[Point]) -> Result<ConvexPolytope> {
    let dim = check_points(points)?;
    match dim {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let mut v = vec![Point::new(vec![lo])];
            if hi > lo {
                v.push(Point::new(vec![hi]));
            }
            Ok(ConvexPolytope::from_vertices_unchecked(1, v))
        }
        2 => Ok(ConvexPolytope::from_vertices_unchecked(2, monotone_chain(points))),
        _ => hull_reduce_lp(points),
    }
}

/// Hull vertices by one LP feasibility test per point: a point is dropped
/// when it lies (within rounding) in the hull of the points still kept.
pub fn hull_reduce_lp(points: &[Point]) -> Result<ConvexPolytope> {
    let dim = check_points(points)?;
    let mut kept = dedup_points(points);
    let scale = kept
        .iter()
        .flat_map(|p| p.coords().iter())
        .fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-11 * scale;
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let others: Vec<Point> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if linf_distance_to_hull(&others, &kept[i])? <= tol {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(ConvexPolytope::from_vertices_unchecked(dim, kept))
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Whether `a` can be dropped between `o` and `b`: a right turn, or a
/// straight run with `a` strictly between its neighbours.
///
/// Straightness is judged by the sine of the turn, not the raw cross
/// product, so short legs next to long ones are never mistaken for
/// collinear; on near-vertical edges the lexicographic order can step
/// backwards, and a backtracking extreme point must stay.
fn droppable(o: &Point, a: &Point, b: &Point) -> bool {
    let c = cross(o, a, b);
    if c <= 0.0 {
        return true;
    }
    let (ux, uy) = (a[0] - o[0], a[1] - o[1]);
    let (vx, vy) = (b[0] - a[0], b[1] - a[1]);
    let forward = ux * vx + uy * vy > 0.0;
    let (lu, lv) = ((ux * ux + uy * uy).sqrt(), (vx * vx + vy * vy).sqrt());
    forward && c <= 1e-13 * lu * (lu + lv)
}

/// Counter-clockwise hull without collinear points.
fn monotone_chain(points: &[Point]) -> Vec<Point> {
    let pts = dedup_points(points);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for (pass, seq) in [pts.clone(), pts.iter().rev().cloned().collect()].into_iter().enumerate() {
        // the upper chain must not pop into the finished lower chain
        let floor = if pass == 0 { 0 } else { hull.len() - 1 };
        for p in seq.into_iter().skip(pass) {
            while hull.len() >= floor + 2 && droppable(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) {
                hull.pop();
            }
            hull.push(p);
        }
    }
    hull.pop();
    // the two passes can collapse onto a segment; drop duplicated endpoints
    let mut out: Vec<Point> = Vec::with_capacity(hull.len());
    for p in hull {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// `lambda * A + (1 - lambda) * B`, hull-reduced.
pub fn minkowski_interp(a: &ConvexPolytope, b: &ConvexPolytope, lambda: f64) -> Result<ConvexPolytope> {
    if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
        return Err(Error::OutOfRange(format!("lambda = {lambda} not in [0, 1]")));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if lambda == 1.0 {
        return Ok(a.clone());
    }
    if lambda == 0.0 {
        return Ok(b.clone());
    }
    let mut pts = Vec::with_capacity(a.vertices().len() * b.vertices().len());
    for va in a.vertices() {
        for vb in b.vertices() {
            pts.push(va.lerp(vb, lambda));
        }
    }
    hull_reduce(&pts)
}

/// Maximum pairwise distance; vertex pairs suffice since the norm of a
/// difference is convex.
pub fn diameter<'a, I>(points: I, norm: NormSpec) -> f64
where
    I: IntoIterator<Item = &'a Point>,
{
    let pts: Vec<&Point> = points.into_iter().collect();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(pts[i].dist(pts[j], norm));
        }
    }
    best
}

/// Support value `max <u, v>` and every vertex attaining it within tolerance.
pub fn support(a: &ConvexPolytope, u: &Point) -> Result<(f64, Vec<Point>)> {
    u.check_dim(a.dim())?;
    if u.coords().iter().all(|c| *c == 0.0) {
        return Err(Error::OutOfRange("zero support direction".into()));
    }
    let values: Vec<f64> = a.vertices().iter().map(|v| v.dot(u)).collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = a
        .vertices()
        .iter()
        .zip(&values)
        .filter(|(_, s)| **s >= max - TIE_TOL)
        .map(|(v, _)| v.clone())
        .collect();
    Ok((max, argmax))
}

/// Equality of hulls by mutual vertex containment.
pub fn hull_equal(a: &ConvexPolytope, b: &ConvexPolytope, tol: f64) -> Result<bool> {
    Ok(a.contains_polytope(b, tol)? && b.contains_polytope(a, tol)?)
}
