//! Dense two-phase simplex for the small linear programs used by the
//! geometry kernels (containment, polyhedral-norm projections, gauges).
//!
//! All variables are nonnegative. Problems are at desk scale: a handful of
//! rows and at most a few hundred columns, so a full tableau is fine.

use crate::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
/// Primal feasibility slack of the ratio test.
const HARRIS_SLACK: f64 = 1e-12;
const COST_EPS: f64 = 1e-12;
/// A column with no pivot row and reduced cost above `-UNBOUNDED_EPS` is
/// taken as rounding noise, not a direction of unboundedness.
const UNBOUNDED_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

/// `minimize c.x` subject to `A_eq x = b_eq`, `A_le x <= b_le`, `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn minimize(mut self, c: Vec<f64>) -> Self {
        debug_assert_eq!(c.len(), self.num_vars);
        self.objective = c;
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.num_vars);
        self.eq.push((row, rhs));
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.num_vars);
        self.le.push((row, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// Row 0 holds reduced costs; column `cols` holds the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Structural + slack columns; artificials follow.
    real_cols: usize,
    cols: usize,
    active: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars;
        let n_slack = lp.le.len();
        let m = lp.eq.len() + lp.le.len();
        let real_cols = n + n_slack;
        let cols = real_cols + m;
        let mut t = vec![vec![0.0; cols + 1]; m + 1];
        let rows = lp
            .eq
            .iter()
            .map(|r| (r, None))
            .chain(lp.le.iter().enumerate().map(|(k, r)| (r, Some(n + k))));
        for (i, ((coef, rhs), slack)) in rows.enumerate() {
            let row = &mut t[i + 1];
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            for (j, a) in coef.iter().enumerate() {
                row[j] = sign * a;
            }
            if let Some(s) = slack {
                row[s] = sign;
            }
            row[real_cols + i] = 1.0;
            row[cols] = sign * rhs;
        }
        // phase-one reduced costs: artificial cost 1
        for i in 1..=m {
            for j in 0..real_cols {
                t[0][j] -= t[i][j];
            }
            t[0][cols] -= t[i][cols];
        }
        Tableau {
            t,
            basis: (0..m).map(|i| real_cols + i).collect(),
            real_cols,
            cols,
            active: vec![true; m],
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r - 1] = c;
        // the relaxed ratio test may leave rounding-level negative values
        for row in self.t.iter_mut().skip(1) {
            if row[self.cols] < 0.0 && row[self.cols] > -1e-9 {
                row[self.cols] = 0.0;
            }
        }
    }

    /// Smallest ratio, ties to the lowest basic index (anti-cycling).
    fn bland_row(&self, c: usize) -> Option<(usize, f64)> {
        let mut leave: Option<(usize, f64)> = None;
        for i in 1..self.t.len() {
            if !self.active[i - 1] {
                continue;
            }
            let a = self.t[i][c];
            if a > PIVOT_EPS {
                let ratio = self.t[i][self.cols].max(0.0) / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && self.basis[i - 1] < self.basis[li - 1]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        leave
    }

    /// Two-pass ratio test: bound the step with slightly relaxed ratios,
    /// then pivot on the largest entry among rows within that bound.
    fn harris_row(&self, c: usize) -> Option<(usize, f64)> {
        let mut bound = f64::INFINITY;
        for i in 1..self.t.len() {
            let a = self.t[i][c];
            if self.active[i - 1] && a > PIVOT_EPS {
                bound = bound.min((self.t[i][self.cols].max(0.0) + HARRIS_SLACK) / a);
            }
        }
        let mut leave: Option<(usize, f64)> = None;
        let mut best = 0.0;
        for i in 1..self.t.len() {
            let a = self.t[i][c];
            if self.active[i - 1] && a > PIVOT_EPS {
                let ratio = self.t[i][self.cols].max(0.0) / a;
                if ratio <= bound && a > best {
                    best = a;
                    leave = Some((i, ratio));
                }
            }
        }
        leave
    }

    fn iterate(&mut self, allowed: usize) -> Result<()> {
        let mut degenerate = 0usize;
        let mut blocked = vec![false; allowed];
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = -COST_EPS;
            for j in 0..allowed {
                if blocked[j] {
                    continue;
                }
                let d = self.t[0][j];
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else {
                return Ok(());
            };
            let leave = if bland { self.bland_row(c) } else { self.harris_row(c) };
            let Some((r, ratio)) = leave else {
                if self.t[0][c] > -UNBOUNDED_EPS {
                    blocked[c] = true;
                    continue;
                }
                return Err(Error::Unbounded);
            };
            blocked.iter_mut().for_each(|b| *b = false);
            if ratio.abs() < 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::NonConvergence {
            what: "simplex",
            iters: MAX_PIVOTS,
        })
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let m = self.basis.len();
        let scale = 1.0
            + lp.eq
                .iter()
                .chain(&lp.le)
                .map(|(_, b)| b.abs())
                .fold(0.0, f64::max);
        self.iterate(self.real_cols)?;
        if -self.t[0][self.cols] > 1e-9 * scale {
            return Err(Error::Infeasible);
        }
        // drive artificials out of the basis or drop redundant rows
        for i in 1..=m {
            if self.basis[i - 1] >= self.real_cols {
                let col = (0..self.real_cols).find(|&j| self.t[i][j].abs() > 1e-9);
                match col {
                    Some(j) => self.pivot(i, j),
                    None => self.active[i - 1] = false,
                }
            }
        }
        // phase-two reduced costs
        let mut cost = vec![0.0; self.real_cols];
        cost[..lp.num_vars].copy_from_slice(&lp.objective);
        let mut row0 = vec![0.0; self.cols + 1];
        row0[..self.real_cols].copy_from_slice(&cost);
        for i in 1..=m {
            if !self.active[i - 1] {
                continue;
            }
            let cb = cost.get(self.basis[i - 1]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (v, a) in row0.iter_mut().zip(&self.t[i]) {
                    *v -= cb * a;
                }
            }
        }
        for v in row0[self.real_cols..self.cols].iter_mut() {
            *v = 0.0;
        }
        self.t[0] = row0;
        self.iterate(self.real_cols)?;

        let mut x = vec![0.0; lp.num_vars];
        for i in 1..=m {
            let b = self.basis[i - 1];
            if self.active[i - 1] && b < lp.num_vars {
                x[b] = self.t[i][self.cols].max(0.0);
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective })
    }
}
