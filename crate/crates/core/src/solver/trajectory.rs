use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::{project_point, ProjectionOptions};
use crate::maps::SetValuedMap;
use crate::{Error, NormSpec, Point, ProjectionFace, Result};

pub const DEFAULT_BRANCH_TOL: f64 = 1e-6;
pub const DEFAULT_FIX_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub x: Point,
    /// Nearest-point data of `F(x)` seen from `x`; `face.value = d(x, F(x))`.
    pub face: ProjectionFace,
    /// `|x_next - x|` with `x_next = face.witness`.
    pub step_norm: f64,
}

impl TrajectoryStep {
    pub fn next(&self) -> &Point {
        &self.face.witness
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "step", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    FixedPoint,
    /// First step whose nearest-point set exceeded `branch_tol` in diameter.
    Branched(usize),
    MaxIter,
}

impl TrajectoryStatus {
    pub fn label(&self) -> &'static str {
        match self {
            TrajectoryStatus::FixedPoint => "fixed_point",
            TrajectoryStatus::Branched(_) => "branched",
            TrajectoryStatus::MaxIter => "max_iter",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub status: TrajectoryStatus,
    /// `d(x_last, F(x_last))` for the last evaluated iterate.
    pub fixed_residual: f64,
    pub regular: bool,
    /// Bound on the distance from the last iterate to the limit,
    /// `step / (1 - lip)`, when the declared bound is below one.
    pub cauchy_tail: Option<f64>,
}

impl Trajectory {
    pub fn last_point(&self) -> &Point {
        &self.steps.last().expect("trajectories have at least one step").x
    }

    /// One row per step: iteration, coordinates, step norm, face diameter,
    /// residual `d(x, F(x))` and a status tag (the trajectory status on the
    /// final row).
    pub fn to_csv(&self, branch_tol: f64) -> String {
        let d = self.steps.first().map_or(0, |s| s.x.dim());
        let mut out = String::from("iter");
        for i in 0..d {
            let _ = write!(out, ",x{i}");
        }
        out.push_str(",step_norm,face_diameter,residual,status\n");
        let last = self.steps.len().saturating_sub(1);
        for (k, s) in self.steps.iter().enumerate() {
            let _ = write!(out, "{k}");
            for c in s.x.coords() {
                let _ = write!(out, ",{c:?}");
            }
            let tag = if k == last {
                self.status.label()
            } else if s.face.face_diameter > branch_tol {
                "branch"
            } else {
                "step"
            };
            let _ = writeln!(out, ",{:?},{:?},{:?},{tag}", s.step_norm, s.face.face_diameter, s.face.value);
        }
        out
    }
}

/// One successive-approximation step `x -> P_{F(x)} x`.
pub fn step(f: &SetValuedMap, x: &Point, norm: NormSpec, tol: f64) -> Result<TrajectoryStep> {
    let value = f.eval(x)?;
    let face = project_point(&value, x, norm, &ProjectionOptions::with_tol(tol))?;
    let step_norm = face.witness.dist(x, norm);
    Ok(TrajectoryStep {
        x: x.clone(),
        face,
        step_norm,
    })
}

/// Iterates [`step`] from `x0` until `d(x, F(x)) <= fix_tol` or `max_iter`
/// steps. A face wider than `branch_tol` marks the trajectory as branched;
/// iteration continues with the face witness.
pub fn run_trajectory(
    f: &SetValuedMap,
    x0: &Point,
    norm: NormSpec,
    max_iter: usize,
    fix_tol: f64,
    branch_tol: f64,
) -> Result<Trajectory> {
    if !(fix_tol > 0.0 && branch_tol > 0.0) || max_iter == 0 {
        return Err(Error::OutOfRange("tolerances and max_iter must be positive".into()));
    }
    let escape_tol = 1e-9 * (1.0 + x0.norm(NormSpec::Linf));
    if !f.domain.contains(x0, escape_tol)? {
        return Err(Error::Precondition("x0 is not in the domain".into()));
    }
    let proj_tol = ProjectionOptions::default().tol.min(fix_tol * 1e-2);
    let mut steps: Vec<TrajectoryStep> = Vec::new();
    let mut branched = None;
    let mut x = x0.clone();
    let mut fixed = false;
    for k in 0..max_iter {
        let s = step(f, &x, norm, proj_tol)?;
        if branched.is_none() && s.face.face_diameter > branch_tol {
            branched = Some(k);
        }
        let done = s.face.value <= fix_tol;
        x = s.next().clone();
        steps.push(s);
        if done {
            fixed = true;
            break;
        }
        if !f.domain.contains(&x, escape_tol)? {
            return Err(Error::Precondition(format!("iterate {} left the domain", k + 1)));
        }
    }
    let last = steps.last().expect("max_iter >= 1");
    let fixed_residual = last.face.value;
    let cauchy_tail = (f.lip_bound < 1.0).then(|| last.step_norm / (1.0 - f.lip_bound));
    let status = match (branched, fixed) {
        (Some(k), _) => TrajectoryStatus::Branched(k),
        (None, true) => TrajectoryStatus::FixedPoint,
        (None, false) => TrajectoryStatus::MaxIter,
    };
    Ok(Trajectory {
        regular: branched.is_none(),
        steps,
        status,
        fixed_residual,
        cauchy_tail,
    })
}
