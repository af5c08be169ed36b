//! Minkowski gauge of a polytope containing the origin in its interior.

use serde::{Deserialize, Serialize};

use crate::geometry::lp::LinearProgram;
use crate::{ConvexPolytope, Error, Point, Result};

/// Largest number of vertex subsets scanned when enumerating facets.
const FACET_SCAN_LIMIT: u64 = 50_000;

/// `gamma(y) = min { t >= 0 : y in t P }` with one subgradient.
///
/// Facet normals scaled to `<n, y> <= 1` are enumerated once when the vertex
/// count allows it; otherwise every evaluation solves the polar LP
/// `max <w, y>` subject to `<w, v> <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    vertices: Vec<Point>,
    facets: Option<Vec<Vec<f64>>>,
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut r = 1u64;
    for i in 0..k as u64 {
        r = r.saturating_mul(n as u64 - i) / (i + 1);
    }
    r
}

fn solve_square(rows: &[&Point]) -> Option<Vec<f64>> {
    let d = rows.len();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| rows[i][j]);
    let rhs = nalgebra::DVector::from_element(d, 1.0);
    let sol = m.lu().solve(&rhs)?;
    sol.iter().all(|v| v.is_finite()).then(|| sol.iter().copied().collect())
}

fn enumerate_facets(vertices: &[Point]) -> Option<Vec<Vec<f64>>> {
    let d = vertices[0].dim();
    let m = vertices.len();
    if m < d + 1 || binomial(m, d) > FACET_SCAN_LIMIT {
        return None;
    }
    let scale = vertices.iter().map(|v| v.norm2()).fold(0.0, f64::max);
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let rows: Vec<&Point> = idx.iter().map(|&i| &vertices[i]).collect();
        if let Some(n) = solve_square(&rows) {
            let dot = |v: &Point| v.coords().iter().zip(&n).map(|(a, b)| a * b).sum::<f64>();
            if vertices.iter().all(|v| dot(v) <= 1.0 + 1e-9) {
                let nn = n.iter().map(|c| c * c).sum::<f64>().sqrt();
                let dup = normals.iter().any(|q| {
                    q.iter().zip(&n).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= 1e-9 * nn.max(1.0 / scale)
                });
                if !dup {
                    normals.push(n);
                }
            }
        }
        // next d-subset in lexicographic order
        let mut k = d;
        loop {
            if k == 0 {
                return Some(normals);
            }
            k -= 1;
            if idx[k] < m - d + k {
                idx[k] += 1;
                for j in k + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl Gauge {
    /// Fails unless the origin is an interior point of `poly`.
    pub fn new(poly: &ConvexPolytope) -> Result<Gauge> {
        let d = poly.dim();
        let mut g = Gauge {
            vertices: poly.vertices().to_vec(),
            facets: None,
        };
        for k in 0..d {
            for s in [1.0, -1.0] {
                let e = Point::unit(d, k).scale(s);
                if g.polar_lp(&e).is_err() {
                    return Err(Error::Precondition("origin is not an interior point".into()));
                }
            }
        }
        g.facets = enumerate_facets(poly.vertices());
        Ok(g)
    }

    pub fn facets(&self) -> Option<&[Vec<f64>]> {
        self.facets.as_deref()
    }

    fn polar_lp(&self, y: &Point) -> Result<(f64, Vec<f64>)> {
        let d = y.dim();
        // w = w_plus - w_minus
        let mut c = vec![0.0; 2 * d];
        for k in 0..d {
            c[k] = -y[k];
            c[d + k] = y[k];
        }
        let mut lp = LinearProgram::new(2 * d).minimize(c);
        for v in &self.vertices {
            let mut row = vec![0.0; 2 * d];
            for k in 0..d {
                row[k] = v[k];
                row[d + k] = -v[k];
            }
            lp.add_le(row, 1.0);
        }
        let sol = lp.solve()?;
        let w: Vec<f64> = (0..d).map(|k| sol.x[k] - sol.x[d + k]).collect();
        Ok((-sol.objective, w))
    }

    pub fn eval(&self, y: &Point) -> Result<(f64, Vec<f64>)> {
        match &self.facets {
            Some(normals) => {
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (i, n) in normals.iter().enumerate() {
                    let v: f64 = n.iter().zip(y.coords()).map(|(a, b)| a * b).sum();
                    if v > best.0 {
                        best = (v, i);
                    }
                }
                Ok((best.0.max(0.0), normals[best.1].clone()))
            }
            None => self.polar_lp(y),
        }
    }

    pub fn value(&self, y: &Point) -> Result<f64> {
        Ok(self.eval(y)?.0)
    }
}
