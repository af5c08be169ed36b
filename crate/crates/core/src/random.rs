//! Seeded generators for random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ConvexPolytope, NormSpec, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the norm ball `B[center, radius]` by rejection from the
/// enclosing cube.
pub fn point_in_ball<R: Rng>(rng: &mut R, center: &Point, radius: f64, norm: NormSpec) -> Point {
    let d = center.dim();
    loop {
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if norm.norm(&u) <= 1.0 {
            return Point::new(center.coords().iter().zip(&u).map(|(c, x)| c + radius * x).collect());
        }
    }
}

/// Uniformly distributed Euclidean unit vector.
pub fn unit_vector<R: Rng>(rng: &mut R, d: usize) -> Point {
    loop {
        let p = point_in_ball(rng, &Point::zeros(d), 1.0, NormSpec::Euclidean);
        let n = p.norm2();
        if n > 1e-3 {
            return p.scale(1.0 / n);
        }
    }
}

/// Random convex weights (flat Dirichlet).
pub fn simplex_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

/// Random point of a polytope, as a random convex combination of vertices.
pub fn point_in_polytope<R: Rng>(rng: &mut R, poly: &ConvexPolytope) -> Point {
    let w = simplex_weights(rng, poly.vertices().len());
    let mut x = vec![0.0; poly.dim()];
    for (v, wi) in poly.vertices().iter().zip(&w) {
        for (xk, vk) in x.iter_mut().zip(v.coords()) {
            *xk += wi * vk;
        }
    }
    Point::new(x)
}

/// Hull of `n` uniform points of the Euclidean ball `B[center, radius]`.
pub fn polytope<R: Rng>(rng: &mut R, center: &Point, radius: f64, n: usize) -> ConvexPolytope {
    let pts: Vec<Point> = (0..n.max(1))
        .map(|_| point_in_ball(rng, center, radius, NormSpec::Euclidean))
        .collect();
    ConvexPolytope::new(&pts).expect("nonempty finite sample")
}

/// Like [`polytope`], redrawn until the hull is full-dimensional.
pub fn full_polytope<R: Rng>(rng: &mut R, center: &Point, radius: f64, n: usize) -> ConvexPolytope {
    let n = n.max(center.dim() + 1);
    loop {
        let p = polytope(rng, center, radius, n);
        if p.is_full_dimensional() {
            return p;
        }
    }
}
