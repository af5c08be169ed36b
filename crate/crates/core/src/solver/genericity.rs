use serde::{Deserialize, Serialize};

use super::induction::{backward_induction, derive_seed, forward_induction, probe_points, InductionOptions, Stage};
use super::trajectory::step;
use crate::geometry::{project_point, ProjectionOptions, TIE_TOL};
use crate::maps::{d_infinity, perturb_at_point, SetValuedMap};
use crate::random::{point_in_ball, point_in_polytope, rng};
use crate::rotund::{polytope_stability_delta, StabilityOptions};
use crate::{ConvexPolytope, Error, NormSpec, Point, Result};
use rand::Rng;

/// Sampled evidence that every `H` with `d_inf(H, G) < delta` and every start
/// in `B(x0, r)` produce `n + 1` nearest-point sets of diameter at most `1 / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityCertificate {
    pub g: SetValuedMap,
    pub x0: Point,
    pub eps: f64,
    pub norm: NormSpec,
    pub seed: u64,
    pub r: f64,
    pub delta: f64,
    pub n: usize,
    /// Sampled lower estimate of `d_inf(F, G)`.
    pub d_inf_f_g: f64,
    /// Sampled lower estimate of `d_inf(F, F~)`.
    pub d_inf_f_f_tilde: f64,
    pub delta0: f64,
    pub ys: Vec<Point>,
    pub stages: Vec<Stage>,
    pub trials: usize,
    /// Largest analytic bound on `d_inf(H, G)` over the trial maps.
    pub max_perturbation: f64,
    pub max_observed_face_diam: f64,
    pub all_passed: bool,
}

/// Nearest-point steps `v_0, ..., v_n` of `h` from `v0`; returns the largest
/// face diameter.
fn worst_face(h: &SetValuedMap, v0: &Point, n: usize, norm: NormSpec) -> Result<f64> {
    let tol = ProjectionOptions::default().tol;
    let mut v = v0.clone();
    let mut worst = 0.0f64;
    for _ in 0..=n {
        let s = step(h, &v, norm, tol)?;
        worst = worst.max(s.face.face_diameter);
        v = s.next().clone();
    }
    Ok(worst)
}

/// Seeded point of `B(center, radius)` inside the domain, or the center.
fn start_point<R: Rng>(rng: &mut R, domain: &ConvexPolytope, center: &Point, radius: f64, norm: NormSpec) -> Result<Point> {
    for _ in 0..16 {
        let v = point_in_ball(rng, center, radius, norm);
        if domain.contains(&v, 0.0)? {
            return Ok(v);
        }
    }
    Ok(center.clone())
}

/// A nonexpansive point perturbation `H` of `g` with `d_inf(H, g) <= bound`
/// for the returned `bound < delta`, placed near one of `centers`.
fn random_perturbation<R: Rng>(
    rng: &mut R,
    g: &SetValuedMap,
    centers: &[(Point, f64)],
    delta: f64,
) -> Result<(SetValuedMap, f64)> {
    let lip = g.lip_bound.max(0.0);
    let xi = if rng.gen_bool(0.25) {
        point_in_polytope(rng, &g.domain)
    } else {
        let (c, rad) = &centers[rng.gen_range(0..centers.len())];
        start_point(rng, &g.domain, c, *rad, g.norm)?
    };
    let r = 0.9 * delta * rng.gen_range(0.5..1.0);
    let rho = 0.99 * r * (1.0 - lip) / 2.0;
    let big_r = 2.0 * r / (1.0 - lip);
    let base = g.eval(&xi)?;
    let moved: Vec<Point> = base.vertices().iter().map(|v| point_in_ball(rng, v, 0.9 * rho, g.norm)).collect();
    let k = ConvexPolytope::new(&moved)?;
    let k = if g.domain.contains_polytope(&k, 0.0)? { k } else { base };
    let h = perturb_at_point(g, &xi, &k, rho, r, big_r)?;
    // inside B(xi, r) the value moves by at most rho + lip r, outside by lip r
    Ok((h, rho + lip * r))
}

/// Constructs `G` within `eps` of `F` and radii `(r, delta)` for the
/// nowhere-density argument, then checks the claim on `trial_budget`
/// random perturbations of `G` and random starts.
pub fn genericity_construct(
    f: &SetValuedMap,
    x0: &Point,
    eps: f64,
    n: usize,
    norm: NormSpec,
    trial_budget: usize,
    seed: u64,
) -> Result<GenericityCertificate> {
    let opts = InductionOptions {
        seed,
        ..InductionOptions::for_dim(f.dim())
    };
    genericity_construct_with(f, x0, eps, n, norm, trial_budget, &opts, &mut |_| {})
}

#[allow(clippy::too_many_arguments)]
pub fn genericity_construct_with(
    f: &SetValuedMap,
    x0: &Point,
    eps: f64,
    n: usize,
    norm: NormSpec,
    trial_budget: usize,
    opts: &InductionOptions,
    progress: &mut dyn FnMut(&str),
) -> Result<GenericityCertificate> {
    if trial_budget == 0 {
        return Err(Error::OutOfRange("trial_budget must be positive".into()));
    }
    let fw = forward_induction(f, x0, eps, norm, n, &opts.approx_schedule)?;
    let samples = probe_points(
        &f.domain,
        &[(x0.clone(), 2.0 * eps / 8.0)],
        opts.dinf_samples,
        norm,
        derive_seed(opts.seed, 1000),
    )?;
    let d_inf_f_f_tilde = d_infinity(f, &fw.f_tilde, &samples)?.estimate;
    progress(&format!(
        "forward: rho0 {:e} anchor gap {:e} d_inf {d_inf_f_f_tilde:e}",
        fw.rho0, fw.anchor_gap
    ));
    let bw = backward_induction(&fw.f_tilde, &fw.ys, eps, n, norm, opts, progress)?;
    let g = bw.g.clone();

    // radius around z_0 = x0 whose nearest points land near z_1
    let z1 = &fw.ys[1];
    let delta1 = bw.stages[0].delta;
    let w0 = g.eval(x0)?;
    let sopts = StabilityOptions {
        samples: opts.stability_samples,
        seed: derive_seed(opts.seed, 0),
    };
    let delta0 = polytope_stability_delta(&w0, x0, z1, delta1 / 2.0, n, norm, &sopts)
        .map_err(|e| Error::StageFailure {
            stage: "closing".into(),
            reason: e.to_string(),
        })?
        .min(0.99 * delta1 / 2.0);
    let r = delta0 / 2.0;
    let delta = r.min(eps / 4.0);
    let mut rings: Vec<(Point, f64)> = vec![(x0.clone(), fw.rho0)];
    rings.extend(bw.stages.iter().map(|s| (s.z.clone(), s.big_r)));
    let samples = probe_points(&f.domain, &rings, opts.dinf_samples, norm, derive_seed(opts.seed, 1001))?;
    let d_inf_f_g = d_infinity(f, &g, &samples)?.estimate;
    progress(&format!("closing: delta0 {delta0:e} r {r:e} delta {delta:e} d_inf {d_inf_f_g:e}"));

    let mut centers: Vec<(Point, f64)> = vec![(x0.clone(), delta0)];
    centers.extend(bw.stages.iter().map(|s| (s.z.clone(), s.delta)));
    let limit = 1.0 / n as f64;
    let mut max_observed = 0.0f64;
    let mut max_perturbation = 0.0f64;
    for t in 0..trial_budget {
        let mut tr = rng(derive_seed(opts.seed, 10_000 + t as u64));
        let run = |tr: &mut _| -> Result<(f64, f64)> {
            let (h, bound) = random_perturbation(tr, &g, &centers, delta)?;
            let v0 = start_point(tr, &f.domain, x0, r, norm)?;
            Ok((bound, worst_face(&h, &v0, n, norm)?))
        };
        let (bound, worst) = run(&mut tr).map_err(|e| Error::StageFailure {
            stage: format!("trial {t}"),
            reason: e.to_string(),
        })?;
        max_perturbation = max_perturbation.max(bound);
        max_observed = max_observed.max(worst);
    }
    progress(&format!("trials: {trial_budget} max face diameter {max_observed:e}"));
    Ok(GenericityCertificate {
        g,
        x0: x0.clone(),
        eps,
        norm,
        seed: opts.seed,
        r,
        delta,
        n,
        d_inf_f_g,
        d_inf_f_f_tilde,
        delta0,
        ys: fw.ys,
        stages: bw.stages,
        trials: trial_budget,
        max_perturbation,
        max_observed_face_diam: max_observed,
        all_passed: max_observed <= limit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipSample {
    pub pass_fraction: f64,
    pub worst_diam: f64,
}

/// Fraction of random starts `v_0` in `B(x0, r)` whose first `n + 1`
/// nearest-point sets all have diameter at most `1 / n`.
pub fn an_membership_sample(
    f: &SetValuedMap,
    x0: &Point,
    n: usize,
    r: f64,
    norm: NormSpec,
    trials: usize,
    seed: u64,
) -> Result<MembershipSample> {
    if trials == 0 || n == 0 {
        return Err(Error::OutOfRange("trials and n must be positive".into()));
    }
    if !f.domain.contains(x0, TIE_TOL)? {
        return Err(Error::Precondition("x0 is not in the domain".into()));
    }
    let limit = 1.0 / n as f64;
    let mut passed = 0usize;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut tr = rng(derive_seed(seed, t as u64));
        let v0 = start_point(&mut tr, &f.domain, x0, r, norm)?;
        let w = worst_face(f, &v0, n, norm)?;
        if w <= limit {
            passed += 1;
        }
        worst = worst.max(w);
    }
    Ok(MembershipSample {
        pass_fraction: passed as f64 / trials as f64,
        worst_diam: worst,
    })
}

/// Whether the nearest point of `G(x0)` to `x0` is `z1` within `tol`.
pub fn first_step_matches(g: &SetValuedMap, x0: &Point, z1: &Point, norm: NormSpec, tol: f64) -> Result<bool> {
    let face = project_point(&g.eval(x0)?, x0, norm, &ProjectionOptions::default())?;
    Ok(face.witness.dist(z1, norm) <= tol)
}
