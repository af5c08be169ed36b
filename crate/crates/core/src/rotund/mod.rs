//! Rotund (strictly convex) bodies from polytopes by Klee's radial map.
//!
//! For a polytope `P` with the origin in its interior and `a > 0`, the map
//! `T(y) = y / (1 + a |y|_2)` sends `P` onto the body
//! `K = { y : gamma_P(y) + a |y|_2 <= 1 }`, whose gauge is the sum of the
//! polyhedral gauge of `P` and a multiple of the Euclidean norm. The
//! Euclidean term makes every boundary segment impossible, so `K` is rotund
//! and metric projections onto it are unique in every norm. All exact
//! queries go through this gauge; a polytope inscribed in `K` serves for
//! warm starts and for callers that need vertex data.

mod ellipsoid;
mod gauge;
mod probe;
mod stability;

use serde::{Deserialize, Serialize};

pub use ellipsoid::{minimize as ellipsoid_minimize, EllipsoidResult, Oracle};
pub use gauge::Gauge;
pub use probe::{project_rotund, rotundity_probe, ExposedFace, PROBE_DEPTH};
pub use stability::{polytope_stability_delta, projection_stability, stability_delta_search, StabilityOptions};

use crate::geometry::{diameter, hausdorff, lp::LinearProgram, TIE_TOL};
use crate::{ConvexPolytope, Error, NormSpec, Point, Result};

/// Boundary subdivisions used by [`rotundify`] when none is requested.
pub fn default_subdiv(dim: usize) -> usize {
    if dim <= 2 {
        32
    } else {
        8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

/// Klee image of a polytope, with an inscribed polytopal approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRotund", into = "RawRotund")]
pub struct RotundSet {
    /// The polytope in local coordinates, origin interior.
    base: ConvexPolytope,
    /// World position of the local origin.
    shift: Point,
    a: f64,
    eps: f64,
    /// Inscribed polytope in world coordinates.
    approx: ConvexPolytope,
    /// Estimated `h(approx, K)`, valid in every supported norm.
    approx_tol: f64,
    gauge: Gauge,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawRotund {
    base: ConvexPolytope,
    shift: Point,
    a: f64,
    eps: f64,
    approx: ConvexPolytope,
    approx_tol: f64,
}

impl TryFrom<RawRotund> for RotundSet {
    type Error = Error;
    fn try_from(r: RawRotund) -> Result<Self> {
        if r.shift.dim() != r.base.dim() || r.approx.dim() != r.base.dim() {
            return Err(Error::DimensionMismatch {
                expected: r.base.dim(),
                got: r.shift.dim(),
            });
        }
        if !(r.a > 0.0 && r.a.is_finite()) {
            return Err(Error::OutOfRange(format!("a = {} must be positive", r.a)));
        }
        let gauge = Gauge::new(&r.base)?;
        Ok(RotundSet {
            base: r.base,
            shift: r.shift,
            a: r.a,
            eps: r.eps,
            approx: r.approx,
            approx_tol: r.approx_tol,
            gauge,
        })
    }
}

impl From<RotundSet> for RawRotund {
    fn from(r: RotundSet) -> Self {
        RawRotund {
            base: r.base,
            shift: r.shift,
            a: r.a,
            eps: r.eps,
            approx: r.approx,
            approx_tol: r.approx_tol,
        }
    }
}

impl RotundSet {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }
    pub fn base(&self) -> &ConvexPolytope {
        &self.base
    }
    pub fn shift(&self) -> &Point {
        &self.shift
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn approx(&self) -> &ConvexPolytope {
        &self.approx
    }
    pub fn approx_tol(&self) -> f64 {
        self.approx_tol
    }

    /// The base polytope in world coordinates.
    pub fn base_world(&self) -> ConvexPolytope {
        self.base.translate(&self.shift)
    }

    pub fn to_local(&self, x: &Point) -> Point {
        x - &self.shift
    }

    pub fn to_world(&self, y: &Point) -> Point {
        y + &self.shift
    }

    /// `T(y)` in local coordinates.
    pub fn klee(&self, y: &Point) -> Point {
        y.scale(1.0 / (1.0 + self.a * y.norm2()))
    }

    /// `T^{-1}(y)`, defined for `a |y|_2 < 1`.
    pub fn klee_inverse(&self, y: &Point) -> Option<Point> {
        let t = self.a * y.norm2();
        (t < 1.0).then(|| y.scale(1.0 / (1.0 - t)))
    }

    /// Gauge of `K` at a world point, with a subgradient.
    pub fn gauge(&self, x: &Point) -> Result<(f64, Vec<f64>)> {
        x.check_dim(self.dim())?;
        let y = self.to_local(x);
        let (gb, mut sub) = self.gauge.eval(&y)?;
        let n = y.norm2();
        if n > 0.0 {
            for (s, yk) in sub.iter_mut().zip(y.coords()) {
                *s += self.a * yk / n;
            }
        }
        Ok((gb + self.a * n, sub))
    }

    /// Exact membership, with boundary band `|gamma_K - 1| <= 1e-9`.
    pub fn membership(&self, x: &Point) -> Result<Membership> {
        let g = self.gauge(x)?.0;
        Ok(if g < 1.0 - TIE_TOL {
            Membership::Inside
        } else if g <= 1.0 + TIE_TOL {
            Membership::Boundary
        } else {
            Membership::Outside
        })
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        Ok(self.gauge(x)?.0 <= 1.0 + tol)
    }

    /// Boundary point on the ray from the center through `x`.
    pub fn radial_boundary(&self, x: &Point) -> Result<Point> {
        let g = self.gauge(x)?.0;
        if g == 0.0 {
            return Err(Error::Degenerate("ray direction is zero".into()));
        }
        Ok(self.to_world(&self.to_local(x).scale(1.0 / g)))
    }

    /// `h(approx, base)` in the given norm.
    pub fn approx_to_base(&self, norm: NormSpec) -> Result<f64> {
        hausdorff(&self.approx, &self.base_world(), norm)
    }

    /// Upper bound on `h(K, base)`: `approx_tol + h(approx, base)`.
    pub fn hausdorff_to_base_bound(&self, norm: NormSpec) -> Result<f64> {
        Ok(self.approx_tol + self.approx_to_base(norm)?)
    }
}

/// Sends `C` through the Klee map centered at `interior_point` with shrink
/// factor `eps`, so that `(1 - eps) C` lies inside the image and the image
/// lies inside `C` (both relative to the center).
pub fn klee_map(c: &ConvexPolytope, eps: f64, interior_point: &Point, approx_subdiv: usize) -> Result<RotundSet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} not in (0, 1)")));
    }
    interior_point.check_dim(c.dim())?;
    if !c.is_full_dimensional() {
        return Err(Error::Degenerate("polytope is not full-dimensional".into()));
    }
    let base = c.translate(&interior_point.scale(-1.0));
    let gauge = Gauge::new(&base)?;
    let zmax = base.vertices().iter().map(Point::norm2).fold(0.0, f64::max);
    let a = eps / (2.0 * (1.0 - eps) * zmax);
    let mut set = RotundSet {
        approx: base.clone(),
        base,
        shift: interior_point.clone(),
        a,
        eps,
        approx_tol: 0.0,
        gauge,
    };
    build_approx(&mut set, approx_subdiv.max(1))?;

    for w in set.base.vertices() {
        if set.gauge(&set.to_world(&w.scale(1.0 - eps)))?.0 >= 1.0 {
            return Err(Error::Degenerate("inner sandwich check failed".into()));
        }
        if set.gauge.value(&set.klee(w))? > 1.0 + TIE_TOL {
            return Err(Error::Degenerate("outer sandwich check failed".into()));
        }
    }
    Ok(set)
}

/// Pairs of base vertices lying on a common facet.
fn boundary_pairs(set: &RotundSet) -> Result<Vec<(usize, usize)>> {
    let v = set.base.vertices();
    let mut pairs = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let on_boundary = match set.gauge.facets() {
                Some(normals) => normals.iter().any(|n| {
                    let dot = |p: &Point| p.coords().iter().zip(n).map(|(a, b)| a * b).sum::<f64>();
                    dot(&v[i]) >= 1.0 - 1e-9 && dot(&v[j]) >= 1.0 - 1e-9
                }),
                None => set.gauge.value(&v[i].lerp(&v[j], 0.5))? >= 1.0 - 1e-9,
            };
            if on_boundary {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

fn dist_to_segment(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let l2 = ab.dot(&ab);
    let t = if l2 > 0.0 {
        ((p - a).dot(&ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.dist(&a.lerp(b, 1.0 - t), NormSpec::Euclidean)
}

/// Inscribed polytope from the Klee image of a boundary mesh, and a bound on
/// its Hausdorff gap sampled between consecutive mesh points.
fn build_approx(set: &mut RotundSet, subdiv: usize) -> Result<()> {
    let d = set.dim();
    let v = set.base.vertices().to_vec();
    let mut mesh: Vec<Point> = Vec::new();
    let mut gap = 0.0f64;
    for (i, j) in boundary_pairs(set)? {
        let at = |t: f64| v[j].lerp(&v[i], t);
        let mut prev = set.klee(&v[i]);
        mesh.push(prev.clone());
        for k in 1..=subdiv {
            let t0 = (k - 1) as f64 / subdiv as f64;
            let t1 = k as f64 / subdiv as f64;
            let next = set.klee(&at(t1));
            for q in [0.25, 0.5, 0.75] {
                let mid = set.klee(&at(t0 + q * (t1 - t0)));
                gap = gap.max(dist_to_segment(&mid, &prev, &next));
            }
            mesh.push(next.clone());
            prev = next;
        }
    }
    let world: Vec<Point> = mesh.iter().map(|p| set.to_world(p)).collect();
    set.approx = ConvexPolytope::new(&world)?;
    // l1 dominates the other norms up to the factor sqrt(d)
    set.approx_tol = gap * (d as f64).sqrt();
    if d >= 3 {
        // facet interiors bulge beyond the meshed edges
        if let Some(normals) = set.gauge.facets() {
            for n in normals {
                let on: Vec<&Point> = v
                    .iter()
                    .filter(|p| p.coords().iter().zip(n).map(|(a, b)| a * b).sum::<f64>() >= 1.0 - 1e-9)
                    .collect();
                let mut c = vec![0.0; d];
                for p in &on {
                    for (ck, pk) in c.iter_mut().zip(p.coords()) {
                        *ck += pk / on.len() as f64;
                    }
                }
                let img = set.to_world(&set.klee(&Point::new(c)));
                let dist = crate::geometry::distance(&set.approx, &img, NormSpec::L1)?;
                set.approx_tol = set.approx_tol.max(dist);
            }
        }
    }
    Ok(())
}

/// Largest ball inscribed in `c` (Chebyshev center), from its facets.
pub fn chebyshev_center(c: &ConvexPolytope) -> Result<Point> {
    let g = c.centroid();
    let local = c.translate(&g.scale(-1.0));
    let gauge = Gauge::new(&local)?;
    let Some(normals) = gauge.facets() else {
        return Ok(g);
    };
    let d = c.dim();
    // variables: center (split into +/- parts) and radius
    let mut obj = vec![0.0; 2 * d + 1];
    obj[2 * d] = -1.0;
    let mut lp = LinearProgram::new(2 * d + 1).minimize(obj);
    for n in normals {
        let mut row = vec![0.0; 2 * d + 1];
        for k in 0..d {
            row[k] = n[k];
            row[d + k] = -n[k];
        }
        row[2 * d] = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        lp.add_le(row, 1.0);
    }
    let sol = lp.solve()?;
    let center: Vec<f64> = (0..d).map(|k| g[k] + sol.x[k] - sol.x[d + k]).collect();
    Ok(Point::new(center))
}

/// Rotund body within `eps` of `C` in Hausdorff distance, centered at the
/// Chebyshev center with shrink factor `min(eps / (2 diam C), eps)`.
pub fn rotundify(c: &ConvexPolytope, eps: f64, approx_subdiv: usize) -> Result<RotundSet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} not in (0, 1)")));
    }
    if !c.is_full_dimensional() {
        return Err(Error::Degenerate("polytope is not full-dimensional".into()));
    }
    let center = chebyshev_center(c)?;
    let diam = diameter(c.vertices(), NormSpec::Euclidean);
    let shrink = (eps / (2.0 * diam)).min(eps);
    klee_map(c, shrink, &center, approx_subdiv)
}

/// Rotund body within `eps` of `C` that contains the point `z` of `C`.
///
/// Interior points are kept by halving the shrink factor of [`rotundify`].
/// A boundary point of `C` is never in a Klee image of `C` itself, so in that
/// case (or when halving runs out) the map is applied to the homothetic
/// copy `c0 + s (C - c0)` with `s = (2 - e) / (2 (1 - e))`, whose image
/// contains all of `C`, with `e` small enough that the copy stays within
/// `eps / 2` of `C`.
pub fn point_anchored_rotundify(c: &ConvexPolytope, eps: f64, z: &Point, approx_subdiv: usize) -> Result<RotundSet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} not in (0, 1)")));
    }
    z.check_dim(c.dim())?;
    if !c.contains(z, TIE_TOL)? {
        return Err(Error::Precondition("z is not in C".into()));
    }
    let mut k = rotundify(c, eps, approx_subdiv)?;
    let interior = k.gauge.value(&k.to_local(z))? < 1.0 - 1e-12;
    if interior {
        let center = k.shift.clone();
        let mut shrink = k.eps;
        while shrink > 1e-12 {
            if k.contains(z, 0.0)? {
                return Ok(k);
            }
            shrink *= 0.5;
            k = klee_map(c, shrink, &center, approx_subdiv)?;
        }
    }
    let center = k.shift.clone();
    let m = c.vertices().iter().map(|w| w.dist(&center, NormSpec::Euclidean)).fold(0.0, f64::max);
    let e = (eps / (m + eps)).min(0.5);
    let s = (2.0 - e) / (2.0 * (1.0 - e));
    let grown = c.scale_about(&center, s);
    let k = klee_map(&grown, e, &center, approx_subdiv)?;
    if !k.contains(z, TIE_TOL)? {
        return Err(Error::Degenerate("no admissible shrink factor keeps z".into()));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexPolytope {
        ConvexPolytope::cube(&[-1.0, -1.0], &[1.0, 1.0])
    }

    #[test]
    fn klee_parameter_on_square() {
        let k = klee_map(&square(), 0.5, &Point::zeros(2), 16).unwrap();
        assert!((k.a() - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(k.membership(&Point::zeros(2)).unwrap(), Membership::Inside);
    }

    #[test]
    fn sandwich_and_boundary() {
        let k = klee_map(&square(), 0.5, &Point::zeros(2), 16).unwrap();
        for w in square().vertices() {
            assert_eq!(k.membership(&w.scale(0.5)).unwrap(), Membership::Inside);
            let t = k.klee(w);
            assert_eq!(k.membership(&t).unwrap(), Membership::Boundary);
            assert_eq!(k.membership(&t.scale(1.01)).unwrap(), Membership::Outside);
            assert!(k.klee_inverse(&t).unwrap().dist(w, NormSpec::Euclidean) < 1e-14);
        }
        let far = Point::new(vec![1.0 / k.a(), 0.0]);
        assert_eq!(k.membership(&far).unwrap(), Membership::Outside);
    }

    #[test]
    fn approx_is_inscribed() {
        let k = klee_map(&square(), 0.3, &Point::new(vec![0.2, -0.1]), 8).unwrap();
        for v in k.approx().vertices() {
            assert!(k.contains(v, 1e-12).unwrap());
        }
        assert!(k.approx_tol() > 0.0 && k.approx_tol() < 1e-2);
    }

    #[test]
    fn degenerate_inputs() {
        let seg = ConvexPolytope::new(&[Point::new(vec![0.0, 0.0]), Point::new(vec![1.0, 0.0])]).unwrap();
        assert!(matches!(rotundify(&seg, 0.5, 8), Err(Error::Degenerate(_))));
        assert!(klee_map(&square(), 1.0, &Point::zeros(2), 8).is_err());
        assert!(klee_map(&square(), 0.5, &Point::new(vec![1.0, 0.0]), 8).is_err());
    }

    #[test]
    fn chebyshev_center_of_rectangle() {
        let r = ConvexPolytope::cube(&[0.0, 0.0], &[4.0, 2.0]);
        let c = chebyshev_center(&r).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-12);
        assert!(c[0] >= 1.0 - 1e-12 && c[0] <= 3.0 + 1e-12);
    }

    #[test]
    fn anchored_at_vertex_and_interior() {
        let sq = square();
        let v = sq.vertices()[0].clone();
        let k = point_anchored_rotundify(&sq, 0.2, &v, 16).unwrap();
        assert!(k.contains(&v, 1e-9).unwrap());
        // K contains C, so the gap is the excess of K over C
        let gap = hausdorff(k.approx(), &sq, NormSpec::Euclidean).unwrap() + k.approx_tol();
        assert!(gap < 0.2, "{gap}");
        for w in sq.vertices() {
            assert!(k.contains(w, 1e-9).unwrap());
        }
        let z = Point::new(vec![0.5, 0.5]);
        let k = point_anchored_rotundify(&sq, 0.2, &z, 16).unwrap();
        assert!(k.contains(&z, 0.0).unwrap());
        assert_eq!(k, rotundify(&sq, 0.2, 16).unwrap());
    }

    #[test]
    fn json_shape() {
        let k = klee_map(&square(), 0.5, &Point::zeros(2), 4).unwrap();
        let v: serde_json::Value = serde_json::to_value(&k).unwrap();
        for key in ["base", "shift", "a", "eps", "approx", "approx_tol"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: RotundSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, k);
    }
}
