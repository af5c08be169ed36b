//! One function per subcommand. Each returns the output text and exit code.

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::json;
use setvalued::geometry::{hausdorff_witness, project_point, HausdorffWitness, ProjectionOptions};
use setvalued::hyperspace::{certify_compact_segment, certify_geodesic, porosity_witness};
use setvalued::maps::{estimate_lip, perturb_at_point};
use setvalued::rotund::{default_subdiv, rotundify, rotundity_probe};
use setvalued::solver::{
    an_membership_sample, genericity_construct_with, perturbation_radii, run_trajectory, InductionOptions,
    TrajectoryStatus, DEFAULT_MAX_ITER,
};
use setvalued::NormSpec;

use crate::config::{Config, SetInput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BRANCHED: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;
pub const EXIT_FAILED: i32 = 4;

pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn json<T: Serialize>(value: &T, code: i32) -> Result<Outcome> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        Ok(Outcome { text, code })
    }
}

const DEFAULT_LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

pub fn run(cfg: &Config, progress: &mut dyn FnMut(&str)) -> Result<Outcome> {
    match cfg.command.as_str() {
        "hausdorff" => hausdorff(cfg),
        "project" => project(cfg),
        "geodesic-check" => geodesic_check(cfg),
        "porosity" => porosity(cfg),
        "rotundify" => rotund(cfg),
        "perturb" => perturb(cfg),
        "trajectory" => trajectory(cfg),
        "an-sample" => an_sample(cfg),
        "genericity" => genericity(cfg, progress),
        other => bail!("unknown command `{other}`"),
    }
}

#[derive(Serialize)]
struct HausdorffReport {
    norm: NormSpec,
    #[serde(flatten)]
    witness: HausdorffWitness,
}

fn hausdorff(cfg: &Config) -> Result<Outcome> {
    let norm = cfg.norm();
    let witness = match (cfg.set("a")?, cfg.set("b")?) {
        (SetInput::Convex(a), SetInput::Convex(b)) => hausdorff_witness(&a, &b, norm)?,
        (a, b) => hausdorff_witness(&a.into_compact()?, &b.into_compact()?, norm)?,
    };
    Outcome::json(&HausdorffReport { norm, witness }, EXIT_OK)
}

fn project(cfg: &Config) -> Result<Outcome> {
    let norm = cfg.norm();
    let set = cfg.polytope("set")?;
    let x = cfg.point("x")?;
    let opts = ProjectionOptions {
        tol: cfg.global.tolerances.proj_tol,
        probe_seed: cfg.global.seed,
        ..Default::default()
    };
    let face = project_point(&set, &x, norm, &opts)?;
    Outcome::json(&json!({ "norm": norm, "x": x, "face": face }), EXIT_OK)
}

fn geodesic_check(cfg: &Config) -> Result<Outcome> {
    let norm = cfg.norm();
    let lambdas: Vec<f64> = cfg.param_or("lambdas", DEFAULT_LAMBDAS.to_vec())?;
    let tol: f64 = cfg.param_or("tol", 1e-9)?;
    let third = if cfg.has_input("c") { Some(cfg.polytope("c")?) } else { None };
    let (passed, body) = match (cfg.set("a")?, cfg.set("b")?) {
        (SetInput::Convex(a), SetInput::Convex(b)) => {
            let cert = certify_geodesic(&a, &b, third.as_ref(), &lambdas, norm)?;
            (cert.passes(tol), serde_json::to_value(&cert)?)
        }
        (a, b) => {
            if third.is_some() {
                bail!("input `c` needs convex `a` and `b`");
            }
            let report = certify_compact_segment(&a.into_compact()?, &b.into_compact()?, &lambdas, norm)?;
            (report.passes(tol), serde_json::to_value(&report)?)
        }
    };
    let code = if passed { EXIT_OK } else { EXIT_FAILED };
    Outcome::json(&json!({ "passed": passed, "tol": tol, "certificate": body }), code)
}

fn porosity(cfg: &Config) -> Result<Outcome> {
    let w = porosity_witness(&cfg.polytope("c")?, &cfg.polytope("k")?, cfg.param("eps")?, cfg.norm())?;
    let code = if w.certifies() { EXIT_OK } else { EXIT_FAILED };
    Outcome::json(&json!({ "certifies": w.certifies(), "witness": w }), code)
}

fn rotund(cfg: &Config) -> Result<Outcome> {
    let set = cfg.polytope("set")?;
    let eps: f64 = cfg.param("eps")?;
    let subdiv: usize = cfg.param_or("subdiv", default_subdiv(set.dim()))?;
    let directions: usize = cfg.param_or("directions", 200)?;
    let n: usize = cfg.param_or("n", 1000)?;
    let k = rotundify(&set, eps, subdiv)?;
    let (probe, probe_ok) = rotundity_probe(&k, directions, cfg.global.seed, n)?;
    let bound = k.hausdorff_to_base_bound(cfg.norm())?;
    Outcome::json(
        &json!({
            "approx_tol": k.approx_tol(),
            "hausdorff_bound": bound,
            "probe_max_face_diam": probe,
            "probe_below_1_over_n": probe_ok,
            "rotund": k,
        }),
        EXIT_OK,
    )
}

fn perturb(cfg: &Config) -> Result<Outcome> {
    let f = cfg.map("map")?;
    let xi = cfg.point("xi")?;
    let k = if cfg.has_input("k") { cfg.polytope("k")? } else { f.eval(&xi)? };
    let (rho, r, big_r) = if cfg.params.contains_key("rho") {
        (cfg.param("rho")?, cfg.param("r")?, cfg.param("big_r")?)
    } else {
        perturbation_radii(f.lip_bound, cfg.param("r_max")?, cfg.param_or("cap", f64::INFINITY)?)?
    };
    let g = perturb_at_point(&f, &xi, &k, rho, r, big_r)?;
    let pairs: usize = cfg.param_or("pairs", 200)?;
    let est = estimate_lip(&g, pairs, cfg.global.seed, true)?;
    Outcome::json(
        &json!({
            "rho": rho,
            "r": r,
            "big_r": big_r,
            "lip_bound": g.lip_bound,
            "lip_estimate": est,
            "map": g,
        }),
        EXIT_OK,
    )
}

fn trajectory(cfg: &Config) -> Result<Outcome> {
    let f = cfg.map("map")?;
    let x0 = cfg.point("x0")?;
    let max_iter: usize = cfg.param_or("max_iter", DEFAULT_MAX_ITER)?;
    let tols = &cfg.global.tolerances;
    let t = run_trajectory(&f, &x0, f.norm, max_iter, tols.fix_tol, tols.branch_tol)?;
    let code = match t.status {
        TrajectoryStatus::FixedPoint => EXIT_OK,
        TrajectoryStatus::Branched(_) => EXIT_BRANCHED,
        TrajectoryStatus::MaxIter => EXIT_MAX_ITER,
    };
    Ok(Outcome {
        text: t.to_csv(tols.branch_tol),
        code,
    })
}

fn an_sample(cfg: &Config) -> Result<Outcome> {
    let f = cfg.map("map")?;
    let s = an_membership_sample(
        &f,
        &cfg.point("x0")?,
        cfg.param("n")?,
        cfg.param("r")?,
        f.norm,
        cfg.param_or("trials", 100)?,
        cfg.global.seed,
    )?;
    Outcome::json(&s, EXIT_OK)
}

fn genericity(cfg: &Config, progress: &mut dyn FnMut(&str)) -> Result<Outcome> {
    let f = cfg.map("map")?;
    let opts = InductionOptions {
        seed: cfg.global.seed,
        ..InductionOptions::for_dim(f.dim())
    };
    let cert = genericity_construct_with(
        &f,
        &cfg.point("x0")?,
        cfg.param("eps")?,
        cfg.param("n")?,
        f.norm,
        cfg.param_or("trials", 100)?,
        &opts,
        progress,
    )?;
    let code = if cert.all_passed { EXIT_OK } else { EXIT_FAILED };
    Outcome::json(&cert, code)
}
