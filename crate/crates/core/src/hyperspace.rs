//! Metric structure of the hyperspace of convex compact sets under the
//! Hausdorff distance: Minkowski segments as geodesics, the failure of that
//! construction for non-convex sets, and porosity of the convex sets among
//! all compact ones.

use serde::{Deserialize, Serialize};

use crate::geometry::{hausdorff, hull_equal, minkowski_interp, project_point, ProjectionOptions, TIE_TOL};
use crate::{CompactSet, ConvexPolytope, Error, NormSpec, Point, Result};

/// `lambda * A + (1 - lambda) * B`, the point of the metric segment from `B`
/// (at 0) to `A` (at 1).
pub fn segment_point(a: &ConvexPolytope, b: &ConvexPolytope, lambda: f64) -> Result<ConvexPolytope> {
    minkowski_interp(a, b, lambda)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCertificate {
    pub a: ConvexPolytope,
    pub b: ConvexPolytope,
    pub norm: NormSpec,
    pub sample_lambdas: Vec<f64>,
    pub h_ab: f64,
    /// `max |h(A, S_l) - (1 - l) h(A, B)|` and `|h(B, S_l) - l h(A, B)|`.
    pub max_endpoint_residual: f64,
    /// `max |h(S_l, S_m) - |l - m| h(A, B)|` over sample pairs.
    pub max_reparam_residual: f64,
    /// `max h(S_l(A, B), S_l(A, C)) - (1 - l) h(B, C)`; negative is slack.
    /// Absent when no third set was given.
    pub max_hyperbolicity_violation: Option<f64>,
}

impl GeodesicCertificate {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_endpoint_residual <= tol
            && self.max_reparam_residual <= tol
            && self.max_hyperbolicity_violation.is_none_or(|v| v <= tol)
    }
}

/// Evaluates the segment identities on the sampled parameters and, given a
/// third set `C`, the hyperbolicity inequality.
pub fn certify_geodesic(
    a: &ConvexPolytope,
    b: &ConvexPolytope,
    third: Option<&ConvexPolytope>,
    sample_lambdas: &[f64],
    norm: NormSpec,
) -> Result<GeodesicCertificate> {
    if let Some(l) = sample_lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::OutOfRange(format!("lambda = {l} not in [0, 1]")));
    }
    let h_ab = hausdorff(a, b, norm)?;
    let segs = sample_lambdas
        .iter()
        .map(|&l| segment_point(a, b, l))
        .collect::<Result<Vec<_>>>()?;

    let mut endpoint = 0.0f64;
    for (&l, s) in sample_lambdas.iter().zip(&segs) {
        endpoint = endpoint
            .max((hausdorff(a, s, norm)? - (1.0 - l) * h_ab).abs())
            .max((hausdorff(b, s, norm)? - l * h_ab).abs());
    }
    let mut reparam = 0.0f64;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let expect = (sample_lambdas[i] - sample_lambdas[j]).abs() * h_ab;
            reparam = reparam.max((hausdorff(&segs[i], &segs[j], norm)? - expect).abs());
        }
    }
    let violation = match third {
        None => None,
        Some(c) => {
            let h_bc = hausdorff(b, c, norm)?;
            let mut worst = f64::NEG_INFINITY;
            for (&l, s) in sample_lambdas.iter().zip(&segs) {
                let t = segment_point(a, c, l)?;
                worst = worst.max(hausdorff(s, &t, norm)? - (1.0 - l) * h_bc);
            }
            Some(worst)
        }
    };
    Ok(GeodesicCertificate {
        a: a.clone(),
        b: b.clone(),
        norm,
        sample_lambdas: sample_lambdas.to_vec(),
        h_ab,
        max_endpoint_residual: endpoint,
        max_reparam_residual: reparam,
        max_hyperbolicity_violation: violation,
    })
}

/// Pointwise combination `{ lambda a + (1 - lambda) b }` of compact sets,
/// built piece by piece.
pub fn pointwise_combination(a: &CompactSet, b: &CompactSet, lambda: f64) -> Result<CompactSet> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} not in [0, 1]")));
    }
    let mut pieces: Vec<ConvexPolytope> = Vec::new();
    for pa in a.pieces() {
        for pb in b.pieces() {
            let m = minkowski_interp(pa, pb, lambda)?;
            if !pieces.contains(&m) {
                pieces.push(m);
            }
        }
    }
    CompactSet::from_pieces(pieces)
}

/// Endpoint identities of the pointwise combination for compact sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSegmentReport {
    pub norm: NormSpec,
    pub sample_lambdas: Vec<f64>,
    pub h_ab: f64,
    /// `h(A, S_l)` for each sample, to be compared with `(1 - l) h(A, B)`.
    pub h_to_a: Vec<f64>,
    pub max_endpoint_residual: f64,
}

impl CompactSegmentReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_endpoint_residual <= tol
    }
}

pub fn certify_compact_segment(
    a: &CompactSet,
    b: &CompactSet,
    sample_lambdas: &[f64],
    norm: NormSpec,
) -> Result<CompactSegmentReport> {
    let h_ab = hausdorff(a, b, norm)?;
    let mut h_to_a = Vec::new();
    let mut worst = 0.0f64;
    for &l in sample_lambdas {
        let s = pointwise_combination(a, b, l)?;
        let ha = hausdorff(a, &s, norm)?;
        let hb = hausdorff(b, &s, norm)?;
        worst = worst.max((ha - (1.0 - l) * h_ab).abs()).max((hb - l * h_ab).abs());
        h_to_a.push(ha);
    }
    Ok(CompactSegmentReport {
        norm,
        sample_lambdas: sample_lambdas.to_vec(),
        h_ab,
        h_to_a,
        max_endpoint_residual: worst,
    })
}

/// The two vertical point pairs `A = {(-1, -1), (-1, 1)}` and
/// `B = {(1, -1), (1, 1)}`.
pub fn counterexample_sets() -> (CompactSet, CompactSet) {
    let pts = |v: &[[f64; 2]]| {
        CompactSet::from_points(&v.iter().map(|p| Point::from(*p)).collect::<Vec<_>>()).expect("nonempty")
    };
    (pts(&[[-1.0, -1.0], [-1.0, 1.0]]), pts(&[[1.0, -1.0], [1.0, 1.0]]))
}

/// Pointwise half-sum of [`counterexample_sets`], which is not a metric
/// midpoint. Returns `(h(A, B), h((A + B) / 2, A))` under the Euclidean norm.
pub fn compact_counterexample() -> Result<(f64, f64)> {
    let (a, b) = counterexample_sets();
    let mid = pointwise_combination(&a, &b, 0.5)?;
    Ok((
        hausdorff(&a, &b, NormSpec::Euclidean)?,
        hausdorff(&mid, &a, NormSpec::Euclidean)?,
    ))
}

/// A compact set near `K` whose `alpha * eps` neighbourhood holds no convex set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityWitness {
    pub k: ConvexPolytope,
    pub z: Point,
    /// `K` together with the isolated point `z`.
    pub k_prime: CompactSet,
    pub eps: f64,
    pub alpha: f64,
    pub norm: NormSpec,
    /// Nearest point of `K` to `z`.
    pub anchor: Point,
    /// Midpoint of `z` and `anchor`.
    pub midpoint: Point,
    /// `d(midpoint, K')`, which equals `3 eps / 8`.
    pub midpoint_gap: f64,
    /// `h(K, K')`, which equals `3 eps / 4`.
    pub h_k_kprime: f64,
}

impl PorosityWitness {
    /// Any convex `L` with `h(K', L) < alpha eps` would hold points within
    /// `alpha eps` of both `z` and `anchor`, hence of their midpoint, which
    /// is impossible once the gap exceeds `alpha eps`.
    pub fn certifies(&self) -> bool {
        self.midpoint_gap > self.alpha * self.eps
    }
}

/// `sup_{x in C} d(x, K)`, attained at a vertex of `C`; returns the value and
/// the first maximizing vertex.
pub fn farthest_vertex(c: &ConvexPolytope, k: &ConvexPolytope, norm: NormSpec) -> Result<(f64, Point)> {
    let mut best = (f64::NEG_INFINITY, c.vertices()[0].clone());
    for v in c.vertices() {
        let d = crate::geometry::distance(k, v, norm)?;
        if d > best.0 {
            best = (d, v.clone());
        }
    }
    Ok(best)
}

/// Builds `K' = K u {z}` with `d(z, K) = 3 eps / 4` for `K` a proper convex
/// subset of `C` and `0 < eps < sup_C d(., K)`.
///
/// With `w` the vertex of `C` farthest from `K` at distance `e0` and `p` a
/// nearest point of `K`, every point `p + t (w - p)` lies at distance exactly
/// `t e0` from `K` (the triangle inequality bounds it both ways), so `z` is
/// placed at `t = 3 eps / (4 e0)` without search.
pub fn porosity_witness(
    c: &ConvexPolytope,
    k: &ConvexPolytope,
    eps: f64,
    norm: NormSpec,
) -> Result<PorosityWitness> {
    if c.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: k.dim(),
        });
    }
    if !c.contains_polytope(k, TIE_TOL)? {
        return Err(Error::Precondition("K is not contained in C".into()));
    }
    if hull_equal(c, k, TIE_TOL)? {
        return Err(Error::Unsupported("K = C".into()));
    }
    let (e0, w) = farthest_vertex(c, k, norm)?;
    if !(eps > 0.0 && eps < e0) {
        return Err(Error::OutOfRange(format!("eps = {eps} not in (0, {e0})")));
    }
    let p = project_point(k, &w, norm, &ProjectionOptions::default())?.witness;
    let t = 0.75 * eps / e0;
    let z = w.lerp(&p, t);
    let midpoint = z.lerp(&p, 0.5);
    let k_prime = CompactSet::from_pieces(vec![k.clone(), ConvexPolytope::singleton(z.clone())])?;
    let midpoint_gap = crate::geometry::distance_to_set(&k_prime, &midpoint, norm)?;
    let h_k_kprime = hausdorff(k, &k_prime, norm)?;
    Ok(PorosityWitness {
        k: k.clone(),
        z,
        k_prime,
        eps,
        alpha: 0.25,
        norm,
        anchor: p,
        midpoint,
        midpoint_gap,
        h_k_kprime,
    })
}
