//! Set-valued maps `F: C -> CK(C)` from closed-form, serializable families.

mod ops;

use serde::{Deserialize, Serialize};

pub use ops::{
    bump_phi, convex_blend, d_infinity, densify_contraction, estimate_lip, perturb_at_point, DInfinity, LipEstimate,
};

use crate::geometry::{diameter, minkowski_interp, TIE_TOL};
use crate::{ConvexPolytope, Error, NormSpec, Point, Result};

/// `[0, 1]`-valued weight on the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Constant { value: f64 },
    /// `max(1 - |x - center| / radius, 0)`.
    Cone { center: Point, radius: f64 },
}

impl ScalarField {
    pub fn eval(&self, x: &Point, norm: NormSpec) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Cone { center, radius } => (1.0 - x.dist(center, norm) / radius).max(0.0),
        }
    }

    pub fn lip_bound(&self) -> f64 {
        match self {
            ScalarField::Constant { .. } => 0.0,
            ScalarField::Cone { radius, .. } => 1.0 / radius,
        }
    }
}

/// Single-valued maps used to reparametrize the argument of a set-valued map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointMap {
    /// `x -> M x + b`.
    Affine { matrix: Vec<Vec<f64>>, offset: Point },
    /// `x -> center + Phi(x - center)` with the radial bump of [`bump_phi`].
    Bump { center: Point, r: f64, big_r: f64 },
}

impl PointMap {
    pub fn apply(&self, x: &Point, norm: NormSpec) -> Result<Point> {
        match self {
            PointMap::Affine { matrix, offset } => Ok(&mat_vec(matrix, x) + offset),
            PointMap::Bump { center, r, big_r } => Ok(&bump_phi(&(x - center), *r, *big_r, norm)? + center),
        }
    }

    pub fn lip_bound(&self, norm: NormSpec) -> f64 {
        match self {
            PointMap::Affine { matrix, .. } => operator_norm(matrix, norm),
            PointMap::Bump { r, big_r, .. } => big_r / (big_r - r),
        }
    }
}

pub(crate) fn mat_vec(m: &[Vec<f64>], x: &Point) -> Point {
    Point::new(m.iter().map(|row| row.iter().zip(x.coords()).map(|(a, b)| a * b).sum()).collect())
}

/// Operator norm of `M` with respect to the given vector norm.
pub fn operator_norm(m: &[Vec<f64>], norm: NormSpec) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match norm {
        NormSpec::Linf => m.iter().map(|row| row.iter().map(|a| a.abs()).sum::<f64>()).fold(0.0, f64::max),
        NormSpec::L1 => (0..m[0].len())
            .map(|j| m.iter().map(|row| row[j].abs()).sum::<f64>())
            .fold(0.0, f64::max),
        NormSpec::Euclidean => {
            let mat = nalgebra::DMatrix::from_fn(m.len(), m[0].len(), |i, j| m[i][j]);
            mat.singular_values().iter().copied().fold(0.0, f64::max)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    AffinePolytope,
    ConvexBlend,
    PointPerturbed,
    Constant,
    Composite,
}

/// How a map evaluates; nested variants form the construction tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapRule {
    Constant {
        value: ConvexPolytope,
    },
    /// `x -> conv { M x + v_i }`.
    AffinePolytope {
        matrix: Vec<Vec<f64>>,
        offsets: ConvexPolytope,
    },
    /// `x -> w(x) A + (1 - w(x)) F(x)`.
    ConvexBlend {
        inner: Box<SetValuedMap>,
        anchor: ConvexPolytope,
        weight: ScalarField,
    },
    /// `x -> l(x) K + (1 - l(x)) F(xi + Phi(x - xi))`, `l` the cone of radius `r` at `xi`.
    PointPerturbed {
        inner: Box<SetValuedMap>,
        xi: Point,
        value: ConvexPolytope,
        rho: f64,
        r: f64,
        big_r: f64,
    },
    /// `x -> F(g(x))`.
    Composite {
        inner: Box<SetValuedMap>,
        point_map: PointMap,
    },
}

/// A set-valued map on a polytope domain with a declared Lipschitz bound
/// (Hausdorff distance of values against the ambient norm of arguments).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetValuedMap {
    pub domain: ConvexPolytope,
    pub norm: NormSpec,
    pub lip_bound: f64,
    #[serde(flatten)]
    pub rule: MapRule,
}

impl SetValuedMap {
    pub fn constant(domain: ConvexPolytope, value: ConvexPolytope, norm: NormSpec) -> Result<Self> {
        check_dims(&domain, value.dim())?;
        Ok(SetValuedMap {
            domain,
            norm,
            lip_bound: 0.0,
            rule: MapRule::Constant { value },
        })
    }

    /// `x -> conv { M x + v }` with `lip_bound` the operator norm of `M`.
    pub fn affine(domain: ConvexPolytope, matrix: Vec<Vec<f64>>, offsets: ConvexPolytope, norm: NormSpec) -> Result<Self> {
        let d = domain.dim();
        check_dims(&domain, offsets.dim())?;
        if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.len(),
            });
        }
        let lip_bound = operator_norm(&matrix, norm);
        Ok(SetValuedMap {
            domain,
            norm,
            lip_bound,
            rule: MapRule::AffinePolytope { matrix, offsets },
        })
    }

    /// `x -> F(g(x))`; `g` must map the domain into itself.
    pub fn compose(inner: SetValuedMap, point_map: PointMap) -> SetValuedMap {
        let lip_bound = inner.lip_bound * point_map.lip_bound(inner.norm);
        SetValuedMap {
            domain: inner.domain.clone(),
            norm: inner.norm,
            lip_bound,
            rule: MapRule::Composite {
                inner: Box::new(inner),
                point_map,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn kind(&self) -> MapKind {
        match &self.rule {
            MapRule::Constant { .. } => MapKind::Constant,
            MapRule::AffinePolytope { .. } => MapKind::AffinePolytope,
            MapRule::ConvexBlend { .. } => MapKind::ConvexBlend,
            MapRule::PointPerturbed { .. } => MapKind::PointPerturbed,
            MapRule::Composite { .. } => MapKind::Composite,
        }
    }

    pub fn eval(&self, x: &Point) -> Result<ConvexPolytope> {
        x.check_dim(self.dim())?;
        match &self.rule {
            MapRule::Constant { value } => Ok(value.clone()),
            MapRule::AffinePolytope { matrix, offsets } => {
                let mx = mat_vec(matrix, x);
                let verts: Vec<Point> = offsets.vertices().iter().map(|v| v + &mx).collect();
                // translation keeps the vertex list irredundant
                Ok(ConvexPolytope::from_vertices_unchecked(self.dim(), verts))
            }
            MapRule::ConvexBlend { inner, anchor, weight } => {
                let w = weight.eval(x, self.norm).clamp(0.0, 1.0);
                if w == 1.0 {
                    return Ok(anchor.clone());
                }
                minkowski_interp(anchor, &inner.eval(x)?, w)
            }
            MapRule::PointPerturbed {
                inner,
                xi,
                value,
                r,
                big_r,
                ..
            } => {
                let l = (1.0 - x.dist(xi, self.norm) / r).max(0.0);
                if l == 1.0 {
                    return Ok(value.clone());
                }
                let moved = &bump_phi(&(x - xi), *r, *big_r, self.norm)? + xi;
                minkowski_interp(value, &inner.eval(&moved)?, l)
            }
            MapRule::Composite { inner, point_map } => inner.eval(&point_map.apply(x, self.norm)?),
        }
    }

    /// Whether `eval(x)` lies in the domain at each sample, within `tol`.
    pub fn range_ok(&self, samples: &[Point], tol: f64) -> Result<bool> {
        for x in samples {
            if !self.domain.contains_polytope(&self.eval(x)?, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lipschitz bound implied by the construction tree.
    pub fn implied_lip(&self) -> f64 {
        match &self.rule {
            MapRule::Constant { .. } => 0.0,
            MapRule::AffinePolytope { matrix, .. } => operator_norm(matrix, self.norm),
            MapRule::ConvexBlend { inner, weight, .. } => match weight {
                ScalarField::Constant { value } => (1.0 - value) * inner.implied_lip(),
                ScalarField::Cone { .. } => {
                    inner.implied_lip() + weight.lip_bound() * diameter(self.domain.vertices(), self.norm)
                }
            },
            MapRule::PointPerturbed { inner, rho, r, big_r, .. } => {
                let l = inner.implied_lip();
                (big_r / (big_r - r) * l).max(l + rho / r)
            }
            MapRule::Composite { inner, point_map } => inner.implied_lip() * point_map.lip_bound(self.norm),
        }
    }

    /// Structural checks for a map read from outside: consistent dimensions
    /// and norms down the tree, parameters in range, values and anchors in
    /// the domain, and a declared bound no smaller than the implied one.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let inside = |p: &ConvexPolytope, what: &str| -> Result<()> {
            check_dims(&self.domain, p.dim())?;
            if !self.domain.contains_polytope(p, TIE_TOL)? {
                return Err(Error::Precondition(format!("{what} is not contained in the domain")));
            }
            Ok(())
        };
        let child = |inner: &SetValuedMap| -> Result<()> {
            if inner.norm != self.norm || inner.domain != self.domain {
                return Err(Error::Precondition("nested map has a different domain or norm".into()));
            }
            inner.validate()
        };
        match &self.rule {
            MapRule::Constant { value } => inside(value, "constant value")?,
            MapRule::AffinePolytope { matrix, offsets } => {
                check_dims(&self.domain, offsets.dim())?;
                if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: matrix.len() });
                }
            }
            MapRule::ConvexBlend { inner, anchor, weight } => {
                child(inner)?;
                inside(anchor, "anchor set")?;
                match weight {
                    ScalarField::Constant { value } if !(0.0..=1.0).contains(value) => {
                        return Err(Error::OutOfRange(format!("weight {value} not in [0, 1]")));
                    }
                    ScalarField::Cone { radius, .. } if !(*radius > 0.0) => {
                        return Err(Error::OutOfRange(format!("cone radius {radius} must be positive")));
                    }
                    _ => {}
                }
            }
            MapRule::PointPerturbed { inner, xi, value, rho, r, big_r } => {
                child(inner)?;
                xi.check_dim(d)?;
                inside(value, "replacement value")?;
                if !(*rho > 0.0 && rho < r && r < big_r) {
                    return Err(Error::OutOfRange(format!(
                        "need 0 < rho < r < R, got rho = {rho}, r = {r}, R = {big_r}"
                    )));
                }
            }
            MapRule::Composite { inner, point_map } => {
                child(inner)?;
                if let PointMap::Bump { r, big_r, .. } = point_map {
                    if !(*r > 0.0 && r < big_r) {
                        return Err(Error::OutOfRange(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
                    }
                }
            }
        }
        let implied = self.implied_lip();
        if !self.lip_bound.is_finite() || self.lip_bound < implied * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!(
                "declared lip_bound {} is below the implied bound {implied}",
                self.lip_bound
            )));
        }
        Ok(())
    }
}

fn check_dims(domain: &ConvexPolytope, got: usize) -> Result<()> {
    if domain.dim() != got {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got,
        });
    }
    Ok(())
}
