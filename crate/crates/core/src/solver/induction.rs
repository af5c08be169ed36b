use serde::{Deserialize, Serialize};

use crate::geometry::{hausdorff, hull_equal, project_point, ProjectionOptions, TIE_TOL};
use crate::maps::{d_infinity, perturb_at_point, SetValuedMap};
use crate::random::{point_in_ball, point_in_polytope, rng};
use crate::rotund::{
    default_subdiv, point_anchored_rotundify, polytope_stability_delta, project_rotund, rotundify, RotundSet,
    StabilityOptions,
};
use crate::{ConvexPolytope, Error, NormSpec, Point, Result};

/// Successive rotund approximations stop once consecutive projections are
/// this close.
pub const CAUCHY_TOL: f64 = 1e-8;

/// Faces narrower than this count as a single nearest point.
const SINGLETON_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductionOptions {
    /// Subdivision of the inscribed polytope at each refinement level; the
    /// rotundification tolerance is divided by four per level.
    pub approx_schedule: Vec<usize>,
    /// Random pairs per candidate radius in the stability searches.
    pub stability_samples: usize,
    /// Random domain points for the sampled `d_inf` checks.
    pub dinf_samples: usize,
    pub seed: u64,
}

impl InductionOptions {
    pub fn for_dim(dim: usize) -> Self {
        InductionOptions {
            approx_schedule: vec![default_subdiv(dim); 16],
            stability_samples: 50,
            dinf_samples: 64,
            seed: 0,
        }
    }
}

fn stage_failure(stage: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::StageFailure {
        stage: stage.into(),
        reason: reason.into(),
    }
}

/// Perturbation radii `(rho, r, R)` with `R <= cap` and
/// `lip R / (R - r) < 1`, `lip + rho / r < 1`, `r < r_max`.
///
/// `r = R (1 - lip) / 2` and `rho = r (1 - lip) / 2` give a new bound of
/// `(1 + lip) / 2` whatever `lip < 1` is.
pub fn perturbation_radii(lip: f64, r_max: f64, cap: f64) -> Result<(f64, f64, f64)> {
    if !(lip < 1.0) {
        return Err(Error::Precondition(format!("lip = {lip} is not below 1")));
    }
    let slack = 1.0 - lip.max(0.0);
    let big_r = (0.9 * cap).min(0.9 * r_max * 2.0 / slack);
    let r = big_r * slack / 2.0;
    let rho = r * slack / 2.0;
    if !(rho > 0.0 && rho < r && r < big_r && r < r_max) {
        return Err(Error::Precondition(format!(
            "empty parameter box (rho = {rho:e}, r = {r:e}, R = {big_r:e})"
        )));
    }
    Ok((rho, r, big_r))
}

/// Limit of projections of `y` onto rotundifications of `v` of shrinking
/// tolerance, cut off by [`CAUCHY_TOL`]. Returns the limit and the level used.
pub fn rotund_limit_projection(
    v: &ConvexPolytope,
    y: &Point,
    norm: NormSpec,
    base_eps: f64,
    schedule: &[usize],
) -> Result<(Point, usize)> {
    let opts = ProjectionOptions::default();
    let mut prev: Option<Point> = None;
    let mut gap = f64::INFINITY;
    for (j, &subdiv) in schedule.iter().enumerate() {
        let eps = base_eps.min(0.5) * 0.25f64.powi(j as i32);
        let k = rotundify(v, eps, subdiv)?;
        let p = project_rotund(&k, y, norm, &opts)?.witness;
        if let Some(q) = &prev {
            gap = p.dist(q, NormSpec::Euclidean);
            if gap < CAUCHY_TOL {
                return Ok((p, j));
            }
        }
        prev = Some(p);
    }
    Err(stage_failure(
        "forward",
        format!("rotund refinement stagnated with Cauchy gap {gap:e}"),
    ))
}

/// Nearest point of `v` to `y`, through the rotund limit when the nearest
/// set is not a singleton.
fn selected_projection(v: &ConvexPolytope, y: &Point, norm: NormSpec, base_eps: f64, schedule: &[usize]) -> Result<Point> {
    let face = project_point(v, y, norm, &ProjectionOptions::default())?;
    if face.face_diameter <= SINGLETON_TOL {
        return Ok(face.witness);
    }
    Ok(rotund_limit_projection(v, y, norm, base_eps, schedule)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardInduction {
    /// `F` with its value at `x0` replaced by an approximated rotund set.
    pub f_tilde: SetValuedMap,
    /// `y_0 = x0, ..., y_n`.
    pub ys: Vec<Point>,
    /// Rotund set whose inscribed polytope is `F~(x0)`; `None` when `F(x0)`
    /// is a single point.
    pub anchor: Option<RotundSet>,
    pub rho0: f64,
    /// `h(F~(x0), F(x0))`.
    pub anchor_gap: f64,
}

/// Builds `F~` close to `F` with a rotund value at `x0` and the sequence
/// `y_{k+1} = P_{F~(y_k)} y_k`.
pub fn forward_induction(
    f: &SetValuedMap,
    x0: &Point,
    eps: f64,
    norm: NormSpec,
    n: usize,
    approx_schedule: &[usize],
) -> Result<ForwardInduction> {
    if !(eps > 0.0) || n == 0 || approx_schedule.is_empty() {
        return Err(Error::OutOfRange("eps, n and the schedule must be positive".into()));
    }
    if !(f.lip_bound < 1.0) {
        return Err(Error::Precondition(format!(
            "lip F = {} is not below 1; densify the map first",
            f.lip_bound
        )));
    }
    if !f.domain.contains(x0, TIE_TOL)? {
        return Err(Error::Precondition("x0 is not in the domain".into()));
    }
    let lip = f.lip_bound;
    let fx0 = f.eval(x0)?;
    let (rho0, r0, big_r0) = perturbation_radii(lip, eps / 8.0, f64::INFINITY)?;
    let (f_tilde, anchor, anchor_gap) = if fx0.is_singleton() {
        (f.clone(), None, 0.0)
    } else {
        let keep_x0 = fx0.contains(x0, TIE_TOL)?;
        let mut found = None;
        let mut last_gap = f64::INFINITY;
        for (j, &subdiv) in approx_schedule.iter().enumerate() {
            let rot_eps = rho0.min(0.5) * 0.25f64.powi(j as i32);
            let k = if keep_x0 {
                point_anchored_rotundify(&fx0, rot_eps, x0, subdiv)?
            } else {
                rotundify(&fx0, rot_eps, subdiv)?
            };
            last_gap = hausdorff(k.approx(), &fx0, norm)?;
            if last_gap < rho0 && f.domain.contains_polytope(k.approx(), TIE_TOL)? {
                found = Some((k, last_gap));
                break;
            }
        }
        let Some((k, gap)) = found else {
            return Err(stage_failure(
                "forward",
                format!("no rotund anchor within rho0 = {rho0:e} inside the domain (gap {last_gap:e})"),
            ));
        };
        let g = perturb_at_point(f, x0, k.approx(), rho0, r0, big_r0)?;
        (g, Some(k), gap)
    };
    let mut ys = vec![x0.clone()];
    for _ in 0..n {
        let y = ys.last().expect("nonempty").clone();
        let v = f_tilde.eval(&y)?;
        let next = selected_projection(&v, &y, norm, rho0, approx_schedule)?;
        ys.push(next);
    }
    Ok(ForwardInduction {
        f_tilde,
        ys,
        anchor,
        rho0,
        anchor_gap,
    })
}

/// Parameters and outputs of one backward stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    /// Index `m` of the point `y_m` the stage perturbs at.
    pub index: usize,
    pub z: Point,
    pub delta: f64,
    pub rho: f64,
    pub r: f64,
    pub big_r: f64,
    /// Rotundification tolerance and subdivision of the new value.
    pub rot_eps: f64,
    pub subdiv: usize,
    /// `|P_{G(z)} z - y_{m+1}|`; zero for the last stage.
    pub anchor_gap: f64,
    /// Declared Lipschitz bound after the stage.
    pub lip: f64,
    /// Sampled `d_inf(F~, G_m)`.
    pub d_inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackwardInduction {
    pub g: SetValuedMap,
    /// Stages in increasing index order, `m = 1, ..., n`.
    pub stages: Vec<Stage>,
    /// Minimum distance between the points `y_0, ..., y_n`.
    pub separation: f64,
}

impl BackwardInduction {
    pub fn zs(&self) -> Vec<Point> {
        self.stages.iter().map(|s| s.z.clone()).collect()
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.delta).collect()
    }
}

fn separation(ys: &[Point], norm: NormSpec) -> Result<f64> {
    let mut c = f64::INFINITY;
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            let d = ys[i].dist(&ys[j], norm);
            if d <= SINGLETON_TOL {
                return Err(stage_failure(
                    "backward",
                    format!("y_{i} and y_{j} coincide; the sequence reached a fixed point"),
                ));
            }
            c = c.min(d);
        }
    }
    Ok(c)
}

/// Domain samples for `d_inf` checks: random points plus rings around the
/// given centers at the given radii.
pub(crate) fn probe_points(
    domain: &ConvexPolytope,
    rings: &[(Point, f64)],
    random: usize,
    norm: NormSpec,
    seed: u64,
) -> Result<Vec<Point>> {
    let mut r = rng(seed);
    let mut pts: Vec<Point> = (0..random).map(|_| point_in_polytope(&mut r, domain)).collect();
    for (c, rad) in rings {
        pts.push(c.clone());
        for frac in [0.25, 0.5, 1.0, 1.5] {
            for _ in 0..4 {
                let p = point_in_ball(&mut r, c, frac * rad, norm);
                if domain.contains(&p, 0.0)? {
                    pts.push(p);
                }
            }
        }
    }
    Ok(pts)
}

pub(crate) fn derive_seed(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Replaces the values of `F~` at `y_n, ..., y_1` by polytopes inscribed in
/// rotund approximations, keeping the map a strict contraction within
/// `eps / 4` of `F~`, and finds radii `delta_m` around each `z_m = y_m` on
/// which nearest points stay narrow and land near `z_{m+1}`.
pub fn backward_induction(
    f_tilde: &SetValuedMap,
    ys: &[Point],
    eps: f64,
    n: usize,
    norm: NormSpec,
    opts: &InductionOptions,
    progress: &mut dyn FnMut(&str),
) -> Result<BackwardInduction> {
    if ys.len() != n + 1 {
        return Err(Error::Precondition(format!("expected {} points, got {}", n + 1, ys.len())));
    }
    let c = separation(ys, norm)?;
    let mut g = f_tilde.clone();
    let mut stages: Vec<Stage> = Vec::new();
    let mut next_delta = 1.0 / n as f64;
    for m in (1..=n).rev() {
        let name = format!("backward stage {m}");
        let (rho, r, big_r) =
            perturbation_radii(g.lip_bound, eps / (8.0 * n as f64), c / 2.0).map_err(|e| stage_failure(&name, e.to_string()))?;
        let y = &ys[m];
        let v = g.eval(y)?;
        // stages m < n must steer the nearest point towards y_{m+1}
        let next = (m < n).then(|| &ys[m + 1]);
        let mut chosen = None;
        let mut best_gap = f64::INFINITY;
        for (j, &subdiv) in opts.approx_schedule.iter().enumerate() {
            let rot_eps = (rho / 2.0).min(0.5) * 0.25f64.powi(j as i32);
            let w = rotundify(&v, rot_eps, subdiv).map_err(|e| stage_failure(&name, e.to_string()))?;
            let w = w.approx().clone();
            if hausdorff(&w, &v, norm)? >= rho / 2.0 {
                continue;
            }
            let p = project_point(&w, y, norm, &ProjectionOptions::default())?.witness;
            let gap = next.map_or(0.0, |q| p.dist(q, norm));
            best_gap = best_gap.min(gap);
            if gap < next_delta / 8.0 {
                chosen = Some((w, p, rot_eps, subdiv, gap));
                break;
            }
        }
        let Some((w, p, rot_eps, subdiv, gap)) = chosen else {
            return Err(stage_failure(
                &name,
                format!("no rotund value steers within {:e} of y_{} (best gap {best_gap:e})", next_delta / 8.0, m + 1),
            ));
        };
        let target = next.unwrap_or(&p);
        let sopts = StabilityOptions {
            samples: opts.stability_samples,
            seed: derive_seed(opts.seed, m as u64),
        };
        let s = polytope_stability_delta(&w, y, target, next_delta / 2.0, n, norm, &sopts)
            .map_err(|e| stage_failure(&name, e.to_string()))?;
        let s = s.min(0.99 * rho).min(0.99 * next_delta);
        let delta = s / 2.0;
        let g_next = perturb_at_point(&g, y, &w, rho, r, big_r)?;
        let rings: Vec<(Point, f64)> = ys[m..].iter().map(|y| (y.clone(), big_r)).collect();
        let samples = probe_points(&g.domain, &rings, opts.dinf_samples, norm, derive_seed(opts.seed, 100 + m as u64))?;
        let dinf = d_infinity(f_tilde, &g_next, &samples)?;
        let d_inf = dinf.estimate;
        let budget = eps * (n + 1 - m) as f64 / (4.0 * n as f64);
        if !(d_inf < budget) {
            return Err(stage_failure(
                &name,
                format!("d_inf(F~, G) = {d_inf:e} exceeds {budget:e} at {:?}", dinf.argmax.coords()),
            ));
        }
        check_unchanged(f_tilde, &g_next, &ys[m..], c / 2.0, derive_seed(opts.seed, 200 + m as u64))
            .map_err(|e| stage_failure(&name, e.to_string()))?;
        progress(&format!(
            "{name}: rho {rho:e} r {r:e} R {big_r:e} delta {delta:e} lip {:.6} d_inf {d_inf:e}",
            g_next.lip_bound
        ));
        stages.push(Stage {
            index: m,
            z: y.clone(),
            delta,
            rho,
            r,
            big_r,
            rot_eps,
            subdiv,
            anchor_gap: gap,
            lip: g_next.lip_bound,
            d_inf,
        });
        g = g_next;
        next_delta = delta;
    }
    stages.reverse();
    Ok(BackwardInduction {
        g,
        stages,
        separation: c,
    })
}

/// `G = F~` at sampled points outside the balls `B(y, radius)`.
fn check_unchanged(f_tilde: &SetValuedMap, g: &SetValuedMap, ys: &[Point], radius: f64, seed: u64) -> Result<()> {
    let mut r = rng(seed);
    let mut checked = 0;
    let mut tries = 0;
    while checked < 100 && tries < 10_000 {
        tries += 1;
        let x = point_in_polytope(&mut r, &g.domain);
        if ys.iter().any(|y| x.dist(y, g.norm) < radius) {
            continue;
        }
        checked += 1;
        if !hull_equal(&g.eval(&x)?, &f_tilde.eval(&x)?, 1e-12)? {
            return Err(Error::Precondition(format!("value changed outside the perturbation balls at {x:?}")));
        }
    }
    Ok(())
}
