//! Minimum-norm point of a convex hull (Euclidean projection kernel).
//!
//! Fully corrective Frank–Wolfe in Wolfe's form: the linear minimization
//! oracle adds a vertex to the active corral, then minor cycles re-solve the
//! affine least-squares problem on the corral and take away-steps toward it
//! until the weights stay nonnegative. This terminates finitely, so the
//! duality gap reaches rounding level instead of stalling on degenerate
//! faces.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct MinNormResult {
    /// Convex weights over the input points.
    pub weights: Vec<f64>,
    pub point: Vec<f64>,
    /// Frank–Wolfe duality gap `|x|^2 - min_i <x, p_i>` at termination.
    pub gap: f64,
    pub iterations: usize,
}

fn combine(points: &[Vec<f64>], idx: &[usize], w: &[f64]) -> Vec<f64> {
    let d = points[0].len();
    let mut x = vec![0.0; d];
    for (&i, &wi) in idx.iter().zip(w) {
        for (xk, pk) in x.iter_mut().zip(&points[i]) {
            *xk += wi * pk;
        }
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affine minimizer of `|sum a_i p_i|` subject to `sum a_i = 1` over the corral.
///
/// Solved as least squares in the edge vectors from one corral point, which
/// keeps the accuracy of tiny distances that a Gram system would square away.
fn affine_min(points: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let k = idx.len();
    if k == 1 {
        return vec![1.0];
    }
    let d = points[0].len();
    let base = &points[idx[0]];
    let m = DMatrix::<f64>::from_fn(d, k - 1, |r, c| points[idx[c + 1]][r] - base[r]);
    let rhs = DVector::<f64>::from_fn(d, |r, _| -base[r]);
    let tol = 1e-13 * m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let beta = m
        .svd(true, true)
        .solve(&rhs, tol)
        .ok()
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| DVector::zeros(k - 1));
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - beta.iter().sum::<f64>());
    alpha.extend(beta.iter().copied());
    alpha
}

/// Minimum Euclidean-norm point of `conv(points)`.
///
/// Stops when the duality gap drops below `gap_tol * |x|^2`, which bounds the
/// relative error of the distance by `gap_tol`, or below the rounding level of
/// the inner products, or when the corral cannot grow.
pub fn min_norm_point(points: &[Vec<f64>], gap_tol: f64, max_iter: usize) -> Result<MinNormResult> {
    if points.is_empty() {
        return Err(Error::Empty("point list"));
    }
    let scale = points
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let start = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .unwrap();
    let mut corral = vec![start];
    let mut w = vec![1.0];
    let mut x = points[start].clone();
    let mut gap;

    // corral, weights, point and squared norm at the start of the last major cycle
    type Snapshot = (Vec<usize>, Vec<f64>, Vec<f64>, f64);
    let mut last: Option<Snapshot> = None;
    for iter in 0..max_iter {
        let mut xx = dot(&x, &x);
        // rounding can stall the strict decrease of a major cycle
        let stalled = last.as_ref().is_some_and(|l| xx >= l.3);
        if stalled {
            let (c, wl, xl, xxl) = last.take().expect("checked");
            (corral, w, x, xx) = (c, wl, xl, xxl);
        }
        let (j, best) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dot(&x, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        gap = xx - best;
        let gap_stop = (gap_tol * xx).max(64.0 * f64::EPSILON * (xx * scale).sqrt());
        if stalled || gap <= gap_stop || xx <= 1e-30 * scale || corral.contains(&j) {
            let mut weights = vec![0.0; points.len()];
            for (&i, &wi) in corral.iter().zip(&w) {
                weights[i] += wi;
            }
            return Ok(MinNormResult {
                weights,
                point: x,
                gap: gap.max(0.0),
                iterations: iter,
            });
        }
        last = Some((corral.clone(), w.clone(), x.clone(), xx));
        corral.push(j);
        w.push(0.0);

        let mut first = true;
        loop {
            let alpha = affine_min(points, &corral);
            if first && alpha.last().is_some_and(|&a| a <= 1e-14) {
                // a near-degenerate corral can reject the improving point, so
                // take a plain line-search step toward it instead
                let dir: Vec<f64> = points[j].iter().zip(&x).map(|(p, xk)| p - xk).collect();
                let t = (-dot(&x, &dir) / dot(&dir, &dir)).clamp(0.0, 1.0);
                for wi in w.iter_mut() {
                    *wi *= 1.0 - t;
                }
                *w.last_mut().expect("pushed") = t;
                x = combine(points, &corral, &w);
                if t < 1.0 {
                    break;
                }
            }
            first = false;
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                x = combine(points, &corral, &w);
                break;
            }
            // step from w toward alpha until the first weight hits zero
            let mut theta = 1.0f64;
            for (wi, ai) in w.iter().zip(&alpha) {
                if *ai <= 1e-14 && wi - ai > 0.0 {
                    theta = theta.min(wi / (wi - ai));
                }
            }
            let mut next: Vec<(usize, f64)> = Vec::with_capacity(corral.len());
            for ((&i, wi), ai) in corral.iter().zip(&w).zip(&alpha) {
                let v = theta * ai + (1.0 - theta) * wi;
                if v > 1e-14 {
                    next.push((i, v));
                }
            }
            if next.is_empty() {
                next.push((j, 1.0));
            }
            let s: f64 = next.iter().map(|(_, v)| v).sum();
            corral = next.iter().map(|(i, _)| *i).collect();
            w = next.iter().map(|(_, v)| v / s).collect();
            x = combine(points, &corral, &w);
            if corral.len() == 1 {
                break;
            }
        }
    }
    Err(Error::NonConvergence {
        what: "minimum-norm point",
        iters: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_projection() {
        // conv{(-1, 1), (1, 1)} -> (0, 1)
        let r = min_norm_point(&[vec![-1.0, 1.0], vec![1.0, 1.0]], 1e-12, 100).unwrap();
        assert!(r.point[0].abs() < 1e-15);
        assert!((r.point[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn origin_inside_triangle() {
        let pts = [vec![-1.0, -1.0], vec![2.0, -1.0], vec![-1.0, 2.0]];
        let r = min_norm_point(&pts, 1e-12, 100).unwrap();
        assert!(r.point.iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn vertex_is_nearest() {
        let pts = [vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 3.0]];
        let r = min_norm_point(&pts, 1e-12, 100).unwrap();
        assert!((r.point[0] - 1.0).abs() < 1e-15 && (r.point[1] - 1.0).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }
}
