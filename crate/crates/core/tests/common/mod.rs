//! Independent oracles for the integration suites.
#![allow(dead_code)]

use setvalued::maps::SetValuedMap;
use setvalued::random::{full_polytope, point_in_ball, point_in_polytope, polytope, rng};
use setvalued::{ConvexPolytope, NormSpec, Point};

pub fn p2(x: f64, y: f64) -> Point {
    Point::new(vec![x, y])
}

pub fn norm_of(i: usize) -> NormSpec {
    NormSpec::ALL[i % 3]
}

/// Random polytope pair in dimension `d` from a single seed.
pub fn random_pair(seed: u64, d: usize) -> (ConvexPolytope, ConvexPolytope) {
    let mut r = rng(seed);
    let c1 = Point::new((0..d).map(|k| 0.3 * k as f64).collect());
    let c2 = Point::new((0..d).map(|k| 0.5 - 0.2 * k as f64).collect());
    (polytope(&mut r, &c1, 1.0, 3 + d * 2), polytope(&mut r, &c2, 0.7, 2 + d * 2))
}

pub fn random_full(seed: u64, d: usize, n: usize) -> ConvexPolytope {
    let mut r = rng(seed);
    full_polytope(&mut r, &Point::zeros(d), 1.0, n)
}

/// `min_{t in [0,1]} |p - (a + t (b - a))|` by ternary search on the convex
/// one-variable function.
pub fn segment_dist(p: &Point, a: &Point, b: &Point, norm: NormSpec) -> f64 {
    let f = |t: f64| p.dist(&a.lerp(b, 1.0 - t), norm);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi)).min(f(0.0)).min(f(1.0))
}

/// Vertices of a planar convex polygon in counterclockwise order, sorted by
/// angle about the vertex mean.
pub fn ccw(poly: &ConvexPolytope) -> Vec<Point> {
    let vs = poly.vertices();
    let n = vs.len() as f64;
    let cx = vs.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = vs.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut out = vs.to_vec();
    out.sort_by(|a, b| (a[1] - cy).atan2(a[0] - cx).total_cmp(&(b[1] - cy).atan2(b[0] - cx)));
    out
}

pub fn inside_polygon(p: &Point, poly: &ConvexPolytope) -> bool {
    let vs = ccw(poly);
    if vs.len() < 3 {
        return false;
    }
    (0..vs.len()).all(|i| {
        let (a, b) = (&vs[i], &vs[(i + 1) % vs.len()]);
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -1e-14
    })
}

/// Exact planar point-to-polygon distance: zero inside, else the nearest edge.
pub fn dist_2d(poly: &ConvexPolytope, p: &Point, norm: NormSpec) -> f64 {
    let vs = ccw(poly);
    match vs.len() {
        1 => p.dist(&vs[0], norm),
        2 => segment_dist(p, &vs[0], &vs[1], norm),
        m => {
            if inside_polygon(p, poly) {
                return 0.0;
            }
            (0..m)
                .map(|i| segment_dist(p, &vs[i], &vs[(i + 1) % m], norm))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Planar Hausdorff distance: point-to-set distance is convex, so each
/// one-sided supremum is attained at a vertex.
pub fn hausdorff_2d(a: &ConvexPolytope, b: &ConvexPolytope, norm: NormSpec) -> f64 {
    let ab = a.vertices().iter().map(|v| dist_2d(b, v, norm)).fold(0.0, f64::max);
    let ba = b.vertices().iter().map(|v| dist_2d(a, v, norm)).fold(0.0, f64::max);
    ab.max(ba)
}

pub fn support_value(poly: &ConvexPolytope, u: &Point) -> f64 {
    poly.vertices().iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
}

/// Unit directions on a circle (d = 2) or the coordinate and diagonal
/// directions (d >= 3).
pub fn directions(d: usize, count: usize) -> Vec<Point> {
    if d == 2 {
        return (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / count as f64;
                p2(t.cos(), t.sin())
            })
            .collect();
    }
    let mut out = Vec::new();
    for k in 0..d {
        out.push(Point::unit(d, k));
        out.push(Point::unit(d, k).scale(-1.0));
    }
    for mask in 0..(1u32 << d) {
        let v: Vec<f64> = (0..d).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect();
        out.push(Point::new(v).scale(1.0 / (d as f64).sqrt()));
    }
    out
}

/// Diameter of the near-optimal set of `|x - .|` over a segment, measured
/// on a grid of `steps + 1` points with slack `tol`.
pub fn segment_face_grid(a: &Point, b: &Point, x: &Point, norm: NormSpec, steps: usize, tol: f64) -> f64 {
    let pts: Vec<Point> = (0..=steps).map(|i| b.lerp(a, i as f64 / steps as f64)).collect();
    let best = pts.iter().map(|q| q.dist(x, norm)).fold(f64::INFINITY, f64::min);
    let near: Vec<&Point> = pts.iter().filter(|q| q.dist(x, norm) <= best + tol).collect();
    let mut diam = 0.0f64;
    for i in 0..near.len() {
        for j in i + 1..near.len() {
            diam = diam.max(near[i].dist(near[j], NormSpec::Euclidean));
        }
    }
    diam
}

pub fn square() -> ConvexPolytope {
    ConvexPolytope::cube(&[-1.0, -1.0], &[1.0, 1.0])
}

/// Affine map on the square with entries in `[-0.3, 0.3]`, so every operator
/// norm is at most 0.6, and offsets in `[-0.3, 0.3]^2`.
pub fn random_affine(seed: u64, norm: NormSpec) -> SetValuedMap {
    let mut r = rng(seed);
    let m: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..2).map(|_| point_in_ball(&mut r, &Point::zeros(1), 0.3, NormSpec::Linf)[0]).collect())
        .collect();
    let offsets = polytope(&mut r, &Point::zeros(2), 0.3, 4);
    SetValuedMap::affine(square(), m, offsets, norm).unwrap()
}

pub fn samples(seed: u64, n: usize) -> Vec<Point> {
    let mut r = rng(seed);
    (0..n).map(|_| point_in_polytope(&mut r, &square())).collect()
}
