//! Ellipsoid method for small nonsmooth convex programs
//! `min f(y)` subject to `g_i(y) <= 0`, driven by value/subgradient oracles.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Value and one subgradient at a point.
pub type Oracle<'a> = dyn Fn(&[f64]) -> Result<(f64, Vec<f64>)> + 'a;

#[derive(Clone, Debug)]
pub struct EllipsoidResult {
    /// Best feasible point seen.
    pub x: Vec<f64>,
    pub value: f64,
    /// Final half-width `sqrt(trace P)` of the localizing ellipsoid.
    pub radius: f64,
    pub iterations: usize,
}

/// Runs deep-cut ellipsoid iterations from the ball `B(center, radius)`,
/// which must contain a minimizer, until the ellipsoid's half-width falls
/// below `tol`.
pub fn minimize(
    objective: &Oracle,
    constraints: &[&Oracle],
    center: &[f64],
    radius: f64,
    tol: f64,
    max_iter: usize,
) -> Result<EllipsoidResult> {
    let d = center.len();
    let nd = d as f64;
    let mut c = DVector::from_column_slice(center);
    let mut p = DMatrix::<f64>::identity(d, d) * (radius * radius);
    let mut best: Option<(Vec<f64>, f64)> = None;

    for iter in 0..max_iter {
        let width = p.trace().max(0.0).sqrt();
        if let (true, Some((x, value))) = (width <= tol, best.as_ref()) {
            let (x, value) = (x.clone(), *value);
            return Ok(EllipsoidResult {
                x,
                value,
                radius: width,
                iterations: iter,
            });
        }
        let cs = c.as_slice();
        // most violated constraint, if any
        let mut cut: Option<(f64, Vec<f64>)> = None;
        for g in constraints {
            let (v, s) = g(cs)?;
            if v > 0.0 && cut.as_ref().is_none_or(|(w, _)| v > *w) {
                cut = Some((v, s));
            }
        }
        let (depth, s) = match cut {
            Some(cut) => cut,
            None => {
                let (f, s) = objective(cs)?;
                let best_f = match &best {
                    Some((_, bf)) if *bf <= f => *bf,
                    _ => {
                        best = Some((cs.to_vec(), f));
                        f
                    }
                };
                (f - best_f, s)
            }
        };
        let s = DVector::from_vec(s);
        let ps = &p * &s;
        let sps = s.dot(&ps);
        if !(sps > 0.0) || !sps.is_finite() {
            // zero subgradient at a feasible point means optimality
            break;
        }
        let root = sps.sqrt();
        let alpha = depth / root;
        if alpha >= 1.0 {
            // the cut removes the whole ellipsoid; rounding has the last word
            break;
        }
        let gt = ps / root;
        if d == 1 {
            // interval [c - w, c + w] cut to its part with s (y - c) <= -depth
            let w = p[(0, 0)].sqrt();
            let lo_hi = if s[0] > 0.0 {
                (c[0] - w, c[0] - depth / s[0])
            } else {
                (c[0] - depth / s[0], c[0] + w)
            };
            c[0] = 0.5 * (lo_hi.0 + lo_hi.1);
            let hw = 0.5 * (lo_hi.1 - lo_hi.0);
            p[(0, 0)] = hw * hw;
            continue;
        }
        c -= &gt * ((1.0 + nd * alpha) / (nd + 1.0));
        let shrink = nd * nd * (1.0 - alpha * alpha) / (nd * nd - 1.0);
        let tau = 2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha));
        p = (p - (&gt * gt.transpose()) * tau) * shrink;
        p = (&p + p.transpose()) * 0.5;
    }
    match best {
        Some((x, value)) => Ok(EllipsoidResult {
            x,
            value,
            radius: p.trace().max(0.0).sqrt(),
            iterations: max_iter,
        }),
        None => Err(Error::NonConvergence {
            what: "ellipsoid method (no feasible point)",
            iters: max_iter,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_disk() {
        // min |y - (3, 0)| over the unit disk -> (1, 0)
        let f = |y: &[f64]| -> Result<(f64, Vec<f64>)> {
            let v = ((y[0] - 3.0).powi(2) + y[1] * y[1]).sqrt();
            Ok((v, vec![(y[0] - 3.0) / v, y[1] / v]))
        };
        let g = |y: &[f64]| -> Result<(f64, Vec<f64>)> {
            let n = (y[0] * y[0] + y[1] * y[1]).sqrt();
            Ok((n - 1.0, vec![y[0] / n.max(1e-300), y[1] / n.max(1e-300)]))
        };
        let r = minimize(&f, &[&g], &[0.1, 0.2], 4.0, 1e-11, 10_000).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-8 && r.x[1].abs() < 1e-8, "{:?}", r);
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn one_dimensional_interval() {
        let f = |y: &[f64]| -> Result<(f64, Vec<f64>)> { Ok(((y[0] - 5.0).abs(), vec![(y[0] - 5.0).signum()])) };
        let g = |y: &[f64]| -> Result<(f64, Vec<f64>)> { Ok((y[0] - 2.0, vec![1.0])) };
        let r = minimize(&f, &[&g], &[0.0], 10.0, 1e-12, 1000).unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-10);
    }
}
