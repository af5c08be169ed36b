use serde::{Deserialize, Serialize};

use super::{MapRule, ScalarField, SetValuedMap};
use crate::geometry::{diameter, hausdorff, TIE_TOL};
use crate::random::{point_in_polytope, rng};
use crate::{ConvexPolytope, Error, NormSpec, Point, Result};
use rand::Rng;

/// Coordinate-search evaluations spent refining a sampled maximum.
const REFINE_EVALS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DInfinity {
    /// Largest `h(F(x), G(x))` over the given samples.
    pub sample_max: f64,
    /// Largest value after local refinement; still a lower bound.
    pub estimate: f64,
    pub argmax: Point,
}

fn value_gap(f: &SetValuedMap, g: &SetValuedMap, x: &Point) -> Result<f64> {
    hausdorff(&f.eval(x)?, &g.eval(x)?, f.norm)
}

/// Coordinate ascent of `score` inside `domain`, starting at `x`.
fn coordinate_ascent<S>(domain: &ConvexPolytope, x: &Point, fx: f64, step: f64, mut score: S) -> Result<(Point, f64)>
where
    S: FnMut(&Point) -> Result<f64>,
{
    let d = x.dim();
    let (mut x, mut best) = (x.clone(), fx);
    let mut step = step;
    let floor = step * 1e-4;
    let mut evals = 0;
    while step > floor && evals < REFINE_EVALS {
        let mut moved = false;
        'dirs: for k in 0..d {
            for s in [1.0, -1.0] {
                let y = &x + &Point::unit(d, k).scale(s * step);
                if !domain.contains(&y, 0.0)? {
                    continue;
                }
                evals += 1;
                let v = score(&y)?;
                if v > best {
                    best = v;
                    x = y;
                    moved = true;
                    break 'dirs;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((x, best))
}

/// Lower estimate of `sup_x h(F(x), G(x))` from samples plus local refinement.
pub fn d_infinity(f: &SetValuedMap, g: &SetValuedMap, samples: &[Point]) -> Result<DInfinity> {
    if samples.is_empty() {
        return Err(Error::Empty("sample points"));
    }
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let mut best = (f64::NEG_INFINITY, samples[0].clone());
    for x in samples {
        let v = value_gap(f, g, x)?;
        if v > best.0 {
            best = (v, x.clone());
        }
    }
    let step = 0.05 * diameter(f.domain.vertices(), NormSpec::Euclidean);
    let (argmax, estimate) = if step > 0.0 && best.0 > 0.0 {
        coordinate_ascent(&f.domain, &best.1, best.0, step, |y| value_gap(f, g, y))?
    } else {
        (best.1.clone(), best.0)
    };
    Ok(DInfinity {
        sample_max: best.0,
        estimate,
        argmax,
    })
}

fn check_inside(domain: &ConvexPolytope, a: &ConvexPolytope, what: &str) -> Result<()> {
    if !domain.contains_polytope(a, TIE_TOL)? {
        return Err(Error::Precondition(format!("{what} is not contained in the domain")));
    }
    Ok(())
}

/// `x -> (1 - gamma) G(x) + gamma A`, a strict contraction within
/// `gamma diam C` of `G`.
pub fn densify_contraction(g: &SetValuedMap, gamma: f64, a: &ConvexPolytope) -> Result<SetValuedMap> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::OutOfRange(format!("gamma = {gamma} not in (0, 1)")));
    }
    check_inside(&g.domain, a, "anchor set")?;
    Ok(SetValuedMap {
        domain: g.domain.clone(),
        norm: g.norm,
        lip_bound: (1.0 - gamma) * g.lip_bound,
        rule: MapRule::ConvexBlend {
            inner: Box::new(g.clone()),
            anchor: a.clone(),
            weight: ScalarField::Constant { value: gamma },
        },
    })
}

/// `x -> w(x) A + (1 - w(x)) F(x)`.
///
/// The declared bound is `lip F + lip w * diam C`, where `diam C` bounds
/// `h(A, F(y))` for values inside the domain.
pub fn convex_blend(f: &SetValuedMap, a: &ConvexPolytope, weight: ScalarField) -> Result<SetValuedMap> {
    check_inside(&f.domain, a, "anchor set")?;
    let diam = diameter(f.domain.vertices(), f.norm);
    Ok(SetValuedMap {
        domain: f.domain.clone(),
        norm: f.norm,
        lip_bound: f.lip_bound + weight.lip_bound() * diam,
        rule: MapRule::ConvexBlend {
            inner: Box::new(f.clone()),
            anchor: a.clone(),
            weight,
        },
    })
}

/// Radial bump: `0` on `B[0, r]`, identity outside `B(0, R)`, and
/// `(|x| - r) R / ((R - r) |x|) x` in between.
pub fn bump_phi(x: &Point, r: f64, big_r: f64, norm: NormSpec) -> Result<Point> {
    if !(r > 0.0 && r < big_r) {
        return Err(Error::OutOfRange(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    let n = x.norm(norm);
    Ok(if n <= r {
        Point::zeros(x.dim())
    } else if n >= big_r {
        x.clone()
    } else {
        x.scale((n - r) * big_r / ((big_r - r) * n))
    })
}

/// Map equal to `K` at `xi` and to `F` outside `B(xi, R)`, within `2 r` of
/// `F` everywhere.
pub fn perturb_at_point(
    f: &SetValuedMap,
    xi: &Point,
    k: &ConvexPolytope,
    rho: f64,
    r: f64,
    big_r: f64,
) -> Result<SetValuedMap> {
    xi.check_dim(f.dim())?;
    if !(rho > 0.0 && rho < r && r < big_r) {
        return Err(Error::Precondition(format!(
            "need 0 < rho < r < R, got rho = {rho}, r = {r}, R = {big_r}"
        )));
    }
    if !f.domain.contains(xi, TIE_TOL)? {
        return Err(Error::Precondition("xi is not in the domain".into()));
    }
    check_inside(&f.domain, k, "replacement value")?;
    let gap = hausdorff(k, &f.eval(xi)?, f.norm)?;
    if gap >= rho {
        return Err(Error::Precondition(format!("h(K, F(xi)) = {gap} is not below rho = {rho}")));
    }
    let lip = (big_r / (big_r - r) * f.lip_bound).max(f.lip_bound + rho / r);
    Ok(SetValuedMap {
        domain: f.domain.clone(),
        norm: f.norm,
        lip_bound: lip,
        rule: MapRule::PointPerturbed {
            inner: Box::new(f.clone()),
            xi: xi.clone(),
            value: k.clone(),
            rho,
            r,
            big_r,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipEstimate {
    pub ratio: f64,
    pub x: Point,
    pub y: Point,
}

/// Largest sampled ratio `h(F(x), F(y)) / |x - y|`, a lower bound on `lip F`.
///
/// Half the pairs are independent domain points, half are short chords
/// (relative length `1e-4 .. 1e-1`) where local expansion shows up.
pub fn estimate_lip(f: &SetValuedMap, pairs: usize, seed: u64, refine: bool) -> Result<LipEstimate> {
    if pairs == 0 {
        return Err(Error::OutOfRange("pairs must be positive".into()));
    }
    let mut r = rng(seed);
    let ratio = |x: &Point, y: &Point| -> Result<f64> {
        let dx = x.dist(y, f.norm);
        if dx < 1e-12 {
            return Ok(0.0);
        }
        Ok(hausdorff(&f.eval(x)?, &f.eval(y)?, f.norm)? / dx)
    };
    let mut best = LipEstimate {
        ratio: 0.0,
        x: f.domain.vertices()[0].clone(),
        y: f.domain.vertices()[0].clone(),
    };
    for i in 0..pairs {
        let x = point_in_polytope(&mut r, &f.domain);
        let z = point_in_polytope(&mut r, &f.domain);
        let y = if i % 2 == 0 {
            z
        } else {
            let s = 10f64.powf(-r.gen_range(1.0..4.0));
            x.lerp(&z, 1.0 - s)
        };
        let v = ratio(&x, &y)?;
        if v > best.ratio {
            best = LipEstimate { ratio: v, x, y };
        }
    }
    if refine && best.ratio > 0.0 {
        let x = best.x.clone();
        let step = 0.25 * best.x.dist(&best.y, NormSpec::Euclidean);
        let (y, v) = coordinate_ascent(&f.domain, &best.y, best.ratio, step, |y| ratio(&x, y))?;
        if v > best.ratio {
            best = LipEstimate { ratio: v, x, y };
        }
    }
    Ok(best)
}
