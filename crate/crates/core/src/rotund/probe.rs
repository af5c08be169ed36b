//! Projections onto rotund bodies and exposed-face probes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ellipsoid::{minimize, Oracle};
use super::RotundSet;
use crate::geometry::{diameter, ProjectionOptions};
use crate::random::{point_in_ball, unit_vector};
use crate::{ConvexPolytope, Error, NormSpec, Point, ProjectionFace, Result};

const ELLIPSOID_MAX_ITER: usize = 20_000;

/// Depth of the caps measured by [`rotundity_probe`]. It only has to exceed
/// the accuracy of the computed support value.
pub const PROBE_DEPTH: f64 = 1e-11;

fn norm_subgradient(v: &[f64], norm: NormSpec) -> Vec<f64> {
    match norm {
        NormSpec::Euclidean => {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                vec![0.0; v.len()]
            } else {
                v.iter().map(|x| x / n).collect()
            }
        }
        NormSpec::L1 => v.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() }).collect(),
        NormSpec::Linf => {
            let k = (0..v.len()).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap_or(0);
            let mut g = vec![0.0; v.len()];
            if v[k] != 0.0 {
                g[k] = v[k].signum();
            }
            g
        }
    }
}

impl RotundSet {
    fn constraint(&self) -> impl Fn(&[f64]) -> Result<(f64, Vec<f64>)> + '_ {
        move |y: &[f64]| {
            let (g, s) = self.gauge(&Point::new(y.to_vec()))?;
            Ok((g - 1.0, s))
        }
    }

    /// Radius of a ball about any point of `K` that contains all of `K`.
    fn enclosing_radius(&self, from: &Point) -> f64 {
        self.base
            .vertices()
            .iter()
            .map(|v| self.to_world(v).dist(from, NormSpec::Euclidean))
            .fold(0.0, f64::max)
    }
}

/// Nearest point of the rotund body `K` to `x`.
///
/// The problem `min |x - y|` subject to `gamma_K(y) <= 1` is solved by the
/// ellipsoid method on exact oracles, started from a seeded jitter of the
/// radial boundary point of `x`. Rotundity makes the minimizer unique, so the
/// returned face is a singleton.
pub fn project_rotund(k: &RotundSet, x: &Point, norm: NormSpec, opts: &ProjectionOptions) -> Result<ProjectionFace> {
    x.check_dim(k.dim())?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if !(opts.tol > 0.0) {
        return Err(Error::OutOfRange(format!("tol = {} must be positive", opts.tol)));
    }
    if k.contains(x, 0.0)? {
        return Ok(ProjectionFace {
            witness: x.clone(),
            value: 0.0,
            face_diameter: 0.0,
            face_samples: vec![x.clone()],
        });
    }
    let radial = k.radial_boundary(x)?;
    let reach = k.enclosing_radius(&radial);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.probe_seed);
    let start = point_in_ball(&mut rng, &radial, 0.1 * reach, NormSpec::Euclidean);
    let objective = |y: &[f64]| -> Result<(f64, Vec<f64>)> {
        let diff: Vec<f64> = y.iter().zip(x.coords()).map(|(a, b)| a - b).collect();
        Ok((norm.norm(&diff), norm_subgradient(&diff, norm)))
    };
    let constraint = k.constraint();
    let scale = 1.0 + x.norm(NormSpec::Linf) + reach;
    let res = minimize(
        &objective,
        &[&constraint as &Oracle],
        start.coords(),
        1.1 * reach + 0.1 * reach,
        opts.tol.min(1e-10) * scale,
        ELLIPSOID_MAX_ITER.min(opts.max_iter.max(1)),
    )?;
    let witness = Point::new(res.x);
    Ok(ProjectionFace {
        value: x.dist(&witness, norm),
        face_samples: vec![witness.clone()],
        witness,
        face_diameter: 0.0,
    })
}

/// Sets whose exposed faces can be measured.
pub trait ExposedFace {
    fn dim(&self) -> usize;
    /// Euclidean diameter of `{ y : <u, y> >= sigma(u) - tol }`.
    fn exposed_face_diameter(&self, u: &Point, tol: f64) -> Result<f64>;
}

impl ExposedFace for ConvexPolytope {
    fn dim(&self) -> usize {
        ConvexPolytope::dim(self)
    }

    fn exposed_face_diameter(&self, u: &Point, tol: f64) -> Result<f64> {
        u.check_dim(self.dim())?;
        let vals: Vec<f64> = self.vertices().iter().map(|v| v.dot(u)).collect();
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let face: Vec<&Point> = self
            .vertices()
            .iter()
            .zip(&vals)
            .filter(|(_, s)| **s >= max - tol)
            .map(|(v, _)| v)
            .collect();
        Ok(diameter(face, NormSpec::Euclidean))
    }
}

/// Orthonormal basis of the complement of the unit vector `u`.
fn tangent_basis(u: &Point) -> Vec<Point> {
    let d = u.dim();
    let mut basis: Vec<Point> = vec![u.clone()];
    for k in 0..d {
        let mut e = Point::unit(d, k);
        for b in &basis {
            e = &e - &b.scale(e.dot(b));
        }
        let n = e.norm2();
        if n > 1e-6 {
            basis.push(e.scale(1.0 / n));
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

impl ExposedFace for RotundSet {
    fn dim(&self) -> usize {
        RotundSet::dim(self)
    }

    /// The cap is measured exactly through the gauge: one program finds the
    /// support value, then its extent is maximized along each tangent
    /// direction.
    fn exposed_face_diameter(&self, u: &Point, tol: f64) -> Result<f64> {
        u.check_dim(self.dim())?;
        let n = u.norm2();
        if n == 0.0 {
            return Err(Error::OutOfRange("zero direction".into()));
        }
        let u = u.scale(1.0 / n);
        let reach = self.enclosing_radius(&self.shift);
        let eps_arg = 1e-13 * (1.0 + reach + self.shift.norm(NormSpec::Linf));
        let constraint = self.constraint();
        let linear = |w: Point| move |y: &[f64]| -> Result<(f64, Vec<f64>)> {
            Ok((-w.coords().iter().zip(y).map(|(a, b)| a * b).sum::<f64>(), w.scale(-1.0).into_coords()))
        };
        let top = minimize(&linear(u.clone()), &[&constraint as &Oracle], self.shift.coords(), 1.05 * reach, eps_arg, ELLIPSOID_MAX_ITER)?;
        let sigma = -top.value;
        let support = Point::new(top.x);
        let cap = |y: &[f64]| -> Result<(f64, Vec<f64>)> {
            let s: f64 = u.coords().iter().zip(y).map(|(a, b)| a * b).sum();
            Ok((sigma - tol - s, u.scale(-1.0).into_coords()))
        };
        let mut pts = vec![support.clone()];
        for w in tangent_basis(&u) {
            for s in [1.0, -1.0] {
                let r = minimize(
                    &linear(w.scale(s)),
                    &[&constraint as &Oracle, &cap as &Oracle],
                    support.coords(),
                    2.1 * reach,
                    eps_arg,
                    ELLIPSOID_MAX_ITER,
                )?;
                pts.push(Point::new(r.x));
            }
        }
        Ok(diameter(&pts, NormSpec::Euclidean))
    }
}

/// Largest exposed-face diameter over the coordinate directions and seeded
/// random unit directions, and whether it stays below `1 / n`.
pub fn rotundity_probe<S: ExposedFace + ?Sized>(k: &S, directions: usize, seed: u64, n: usize) -> Result<(f64, bool)> {
    if directions == 0 || n == 0 {
        return Err(Error::OutOfRange("directions and n must be positive".into()));
    }
    let d = k.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..directions {
        let u = if i < 2 * d {
            Point::unit(d, i / 2).scale(if i % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            unit_vector(&mut rng, d)
        };
        worst = worst.max(k.exposed_face_diameter(&u, PROBE_DEPTH)?);
    }
    Ok((worst, worst < 1.0 / n as f64))
}
