//! Point-to-set distance and the Hausdorff distance.

use std::slice;

use serde::{Deserialize, Serialize};

use super::projection::{distance, project_point, ProjectionOptions};
use super::{CompactSet, ConvexPolytope, NormSpec, Point};
use crate::{Error, Result};

/// A compact set given as a finite union of convex polytopes.
pub trait Pieces {
    fn dim(&self) -> usize;
    fn pieces(&self) -> &[ConvexPolytope];
}

impl Pieces for ConvexPolytope {
    fn dim(&self) -> usize {
        ConvexPolytope::dim(self)
    }
    fn pieces(&self) -> &[ConvexPolytope] {
        slice::from_ref(self)
    }
}

impl Pieces for CompactSet {
    fn dim(&self) -> usize {
        CompactSet::dim(self)
    }
    fn pieces(&self) -> &[ConvexPolytope] {
        CompactSet::pieces(self)
    }
}

/// `d(x, S)`: the smallest distance to any piece.
pub fn distance_to_set<S: Pieces + ?Sized>(set: &S, x: &Point, norm: NormSpec) -> Result<f64> {
    let mut best = f64::INFINITY;
    for piece in set.pieces() {
        best = best.min(distance(piece, x, norm)?);
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}

/// `sup_{a in A} d(a, B)`.
///
/// `d(., B)` is convex when `B` is convex, so the supremum over a convex
/// piece of `A` sits at one of its vertices. When `B` has several pieces that
/// argument fails, and a non-singleton piece of `A` is only accepted if some
/// piece of `B` contains it.
pub fn one_sided_excess<A, B>(a: &A, b: &B, norm: NormSpec) -> Result<f64>
where
    A: Pieces + ?Sized,
    B: Pieces + ?Sized,
{
    Ok(excess_with_vertex(a, b, norm)?.0)
}

/// The excess and the first vertex of `A` attaining it.
fn excess_with_vertex<A, B>(a: &A, b: &B, norm: NormSpec) -> Result<(f64, Point)>
where
    A: Pieces + ?Sized,
    B: Pieces + ?Sized,
{
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let convex_target = b.pieces().len() == 1;
    let mut worst = (0.0f64, a.pieces()[0].vertices()[0].clone());
    for piece in a.pieces() {
        if !convex_target && !piece.is_singleton() {
            let mut covered = false;
            for q in b.pieces() {
                if q.contains_polytope(piece, 0.0)? {
                    covered = true;
                    break;
                }
            }
            if covered {
                continue;
            }
            return Err(Error::Unsupported(
                "excess of a convex piece over a non-convex union".into(),
            ));
        }
        for v in piece.vertices() {
            let d = distance_to_set(b, v, norm)?;
            if d > worst.0 {
                worst = (d, v.clone());
            }
        }
    }
    Ok(worst)
}

/// `h(A, B) = max(sup_A d(., B), sup_B d(., A))`.
pub fn hausdorff<A, B>(a: &A, b: &B, norm: NormSpec) -> Result<f64>
where
    A: Pieces + ?Sized,
    B: Pieces + ?Sized,
{
    Ok(one_sided_excess(a, b, norm)?.max(one_sided_excess(b, a, norm)?))
}

/// A pair realizing the Hausdorff distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffWitness {
    pub value: f64,
    pub excess_ab: f64,
    pub excess_ba: f64,
    /// Vertex of the set with the larger excess.
    pub from: Point,
    /// A nearest point of the other set to `from`.
    pub to: Point,
    /// Whether `from` lies in `A`.
    pub from_a: bool,
}

pub fn hausdorff_witness<A, B>(a: &A, b: &B, norm: NormSpec) -> Result<HausdorffWitness>
where
    A: Pieces + ?Sized,
    B: Pieces + ?Sized,
{
    let (ab, va) = excess_with_vertex(a, b, norm)?;
    let (ba, vb) = excess_with_vertex(b, a, norm)?;
    let from_a = ab >= ba;
    let (from, target) = if from_a { (va, b.pieces()) } else { (vb, a.pieces()) };
    let opts = ProjectionOptions::default();
    let mut best: Option<(f64, Point)> = None;
    for piece in target {
        let face = project_point(piece, &from, norm, &opts)?;
        if best.as_ref().is_none_or(|(d, _)| face.value < *d) {
            best = Some((face.value, face.witness));
        }
    }
    let to = best.map(|(_, p)| p).ok_or(Error::Empty("target set"))?;
    Ok(HausdorffWitness {
        value: ab.max(ba),
        excess_ab: ab,
        excess_ba: ba,
        from,
        to,
        from_a,
    })
}
