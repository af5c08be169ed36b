//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use serde_json::Value;
use setvalued::geometry::{hausdorff, hull_equal, project_point, ProjectionOptions};
use setvalued::hyperspace::{compact_counterexample, counterexample_sets, porosity_witness, segment_point};
use setvalued::maps::{bump_phi, densify_contraction, estimate_lip, perturb_at_point, SetValuedMap};
use setvalued::random::{full_polytope, point_in_ball, point_in_polytope, rng};
use setvalued::rotund::{chebyshev_center, klee_map, project_rotund, rotundify, rotundity_probe, Membership};
use setvalued::solver::{
    genericity_construct_with, perturbation_radii, run_trajectory, InductionOptions, TrajectoryStatus,
    DEFAULT_BRANCH_TOL, DEFAULT_FIX_TOL,
};
use setvalued::{CompactSet, ConvexPolytope, NormSpec, Point};

const LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Named input of a fixture config, following relative paths.
fn input(config: &Path, name: &str) -> Value {
    let cfg = read_json(config);
    match &cfg["inputs"][name] {
        Value::String(rel) => read_json(&config.parent().unwrap().join(rel)),
        Value::Null => panic!("{}: no input {name}", config.display()),
        v => v.clone(),
    }
}

fn param<T: serde::de::DeserializeOwned>(config: &Path, name: &str) -> T {
    serde_json::from_value(read_json(config)["params"][name].clone()).unwrap()
}

fn c1_counterexample() -> Check {
    let (h_ab, h_half) = compact_counterexample().map_err(|e| e.to_string())?;
    ensure((h_ab - 2.0).abs() <= 1e-12, || format!("h(A,B) = {h_ab}"))?;
    ensure((h_half - 2f64.sqrt()).abs() <= 1e-12, || format!("h(half sum, A) = {h_half}"))?;
    let cfg = fixtures().join("hausdorff_two_segments.json");
    let a: CompactSet = serde_json::from_value(input(&cfg, "a")["compact"].clone()).unwrap();
    let b: CompactSet = serde_json::from_value(input(&cfg, "b")["compact"].clone()).unwrap();
    ensure((a.clone(), b.clone()) == counterexample_sets(), || "fixture differs from the example sets".into())?;
    let h = hausdorff(&a, &b, NormSpec::Euclidean).unwrap();
    ensure((h - 2.0).abs() <= 1e-12, || format!("fixture h = {h}"))?;
    Ok(format!("h(A,B) = {h_ab}, h(half sum, A) = {h_half:.17}"))
}

fn c2_segment_identities() -> Check {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let d = 2 + (i % 2) as usize;
        let (a, b) = random_pair(1000 + i, d);
        for norm in NormSpec::ALL {
            let h = hausdorff(&a, &b, norm).unwrap();
            let segs: Vec<ConvexPolytope> = LAMBDAS.iter().map(|&l| segment_point(&a, &b, l).unwrap()).collect();
            for (i_l, &l) in LAMBDAS.iter().enumerate() {
                let r = (hausdorff(&a, &segs[i_l], norm).unwrap() - (1.0 - l) * h).abs();
                worst = worst.max(r);
                for (i_m, &m) in LAMBDAS.iter().enumerate() {
                    let r = (hausdorff(&segs[i_l], &segs[i_m], norm).unwrap() - (l - m).abs() * h).abs();
                    worst = worst.max(r);
                }
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.3e} over 100 pairs x 3 norms"))
}

fn c3_hyperbolicity() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for norm in NormSpec::ALL {
        for i in 0..100u64 {
            let d = 2 + (i % 2) as usize;
            let (a, b) = random_pair(2000 + i, d);
            let (c, _) = random_pair(3000 + i, d);
            let h_bc = hausdorff(&b, &c, norm).unwrap();
            for &l in &LAMBDAS {
                let s_ab = segment_point(&a, &b, l).unwrap();
                let s_ac = segment_point(&a, &c, l).unwrap();
                worst = worst.max(hausdorff(&s_ab, &s_ac, norm).unwrap() - (1.0 - l) * h_bc);
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max violation {worst:e}"))?;
    Ok(format!("max violation {worst:.3e} over 100 triples x 3 norms"))
}

fn c4_porosity() -> Check {
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let norm = norm_of(i as usize);
        let mut r = rng(4000 + i);
        let c = full_polytope(&mut r, &Point::zeros(2), 1.0, 6);
        let g = c.centroid();
        let k = ConvexPolytope::new(&c.vertices().iter().map(|v| g.lerp(v, 0.3)).collect::<Vec<_>>()).unwrap();
        let e0 = c
            .vertices()
            .iter()
            .map(|v| setvalued::geometry::distance(&k, v, norm).unwrap())
            .fold(0.0, f64::max);
        let eps = e0 * (0.1 + 0.8 * point_in_ball(&mut r, &Point::zeros(1), 1.0, NormSpec::Linf)[0].abs());
        let w = porosity_witness(&c, &k, eps, norm).map_err(|e| e.to_string())?;
        let r1 = (w.h_k_kprime - 0.75 * eps).abs();
        let r2 = (w.midpoint_gap - 0.375 * eps).abs();
        worst = worst.max(r1).max(r2);
        ensure(r1 <= 1e-9 && r2 <= 1e-9, || format!("instance {i}: residuals {r1:e}, {r2:e}"))?;
        ensure(w.midpoint_gap > 0.25 * eps && w.certifies(), || format!("instance {i}: gap below eps/4"))?;
    }
    Ok(format!("max residual {worst:.3e} over 20 instances"))
}

fn c5_klee_sandwich() -> Check {
    let mut worst_probe = 0.0f64;
    for i in 0..50u64 {
        let c = random_full(5000 + i, 2, 5 + (i % 6) as usize);
        let center = chebyshev_center(&c).map_err(|e| e.to_string())?;
        for eps in [0.1, 0.5] {
            let k = klee_map(&c, eps, &center, 64).map_err(|e| e.to_string())?;
            for w in k.base().vertices() {
                let shrunk = k.to_world(&w.scale(1.0 - eps));
                ensure(k.membership(&shrunk).unwrap() != Membership::Outside, || {
                    format!("polytope {i}, eps {eps}: (1 - eps) w outside K")
                })?;
                let tw = k.to_world(&k.klee(w));
                ensure(c.contains(&tw, 1e-12).unwrap(), || format!("polytope {i}, eps {eps}: T(w) outside C"))?;
            }
            let (probe, _) = rotundity_probe(&k, 200, i, 1000).map_err(|e| e.to_string())?;
            worst_probe = worst_probe.max(probe);
            ensure(probe <= 1e-3, || format!("polytope {i}, eps {eps}: probe {probe:e}"))?;
        }
    }
    Ok(format!("max probe face diameter {worst_probe:.3e} over 50 polytopes x 2 eps"))
}

fn c6_unique_projection() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for norm in [NormSpec::Euclidean, NormSpec::Linf] {
        for i in 0..50u64 {
            let c = random_full(6000 + i / 10, 2, 6);
            let k = rotundify(&c, 0.3, 32).map_err(|e| e.to_string())?;
            let mut r = rng(6100 + i);
            let x = loop {
                let x = point_in_ball(&mut r, &Point::zeros(2), 3.0, NormSpec::Euclidean);
                if !k.contains(&x, 1e-9).unwrap() {
                    break x;
                }
            };
            let witnesses: Vec<Point> = (0..5u64)
                .map(|s| {
                    let opts = ProjectionOptions {
                        probe_seed: 7919 * s + 1,
                        ..Default::default()
                    };
                    project_rotund(&k, &x, norm, &opts).map(|f| f.witness)
                })
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for w in &witnesses[1..] {
                worst = worst.max(w.dist(&witnesses[0], NormSpec::Euclidean));
            }
            count += 1;
        }
    }
    ensure(worst <= 1e-6, || format!("witness spread {worst:e}"))?;
    let sq = square();
    let mut widest = 0.0f64;
    let mut r = rng(6200);
    for _ in 0..50 {
        let x = point_in_ball(&mut r, &Point::zeros(2), 3.0, NormSpec::Euclidean);
        let face = project_point(&sq, &x, NormSpec::Linf, &ProjectionOptions::default()).unwrap();
        widest = widest.max(face.face_diameter);
    }
    ensure(widest >= 0.5, || format!("raw square linf faces at most {widest}"))?;
    Ok(format!("witness spread {worst:.3e} over {count} points x 5 seeds; raw square linf face {widest:.3}"))
}

fn c7_operators() -> Check {
    let (r, big_r) = (0.2, 0.5);
    let mut g = rng(7000);
    let mut lip = 0.0f64;
    for i in 0..10_000usize {
        let norm = norm_of(i);
        let x = point_in_ball(&mut g, &Point::zeros(2), 0.8, NormSpec::Euclidean);
        let y = point_in_ball(&mut g, &x, 0.05, NormSpec::Euclidean);
        let px = bump_phi(&x, r, big_r, norm).unwrap();
        let n = x.norm(norm);
        if n <= r {
            ensure(px == Point::zeros(2), || format!("phi({x:?}) = {px:?} inside r"))?;
        } else if n >= big_r {
            ensure(px == x, || format!("phi({x:?}) = {px:?} outside R"))?;
        }
        ensure(px.dist(&x, norm) <= r * (1.0 + 1e-12), || format!("|phi(x) - x| > r at {x:?}"))?;
        let py = bump_phi(&y, r, big_r, norm).unwrap();
        let d = x.dist(&y, norm);
        if d > 0.0 {
            lip = lip.max(px.dist(&py, norm) / d);
        }
    }
    let lip_bound = 1.0 + r / (big_r - r);
    ensure(lip <= lip_bound + 1e-6, || format!("bump Lipschitz {lip} > {lip_bound}"))?;

    let mut worst_gap = 0.0f64;
    for (i, norm) in NormSpec::ALL.into_iter().enumerate() {
        let f = densify_contraction(&random_affine(7100 + i as u64, norm), 0.2, &ConvexPolytope::cube(&[0.0, 0.0], &[0.2, 0.2]))
            .unwrap();
        let xi = p2(0.1, -0.1);
        let (rho, rr, rbig) = perturbation_radii(f.lip_bound, 0.2, f64::INFINITY).unwrap();
        let k = f.eval(&xi).unwrap().translate(&p2(0.5 * rho, -0.3 * rho));
        let h = perturb_at_point(&f, &xi, &k, rho, rr, rbig).map_err(|e| e.to_string())?;
        ensure(hull_equal(&h.eval(&xi).unwrap(), &k, 1e-12).unwrap(), || "G(xi) != K".into())?;
        let mut s = rng(7200 + i as u64);
        let mut outside = 0;
        while outside < 100 {
            let x = point_in_polytope(&mut s, &f.domain);
            if x.dist(&xi, norm) >= rbig {
                let gap = hausdorff(&h.eval(&x).unwrap(), &f.eval(&x).unwrap(), norm).unwrap();
                ensure(gap <= 1e-12, || format!("G != F outside B(xi, R): {gap:e}"))?;
                outside += 1;
            }
        }
        for _ in 0..500 {
            let x = point_in_ball(&mut s, &xi, rbig, norm);
            if !f.domain.contains(&x, 0.0).unwrap() {
                continue;
            }
            let gap = hausdorff(&h.eval(&x).unwrap(), &f.eval(&x).unwrap(), norm).unwrap();
            worst_gap = worst_gap.max(gap / rr);
            ensure(gap <= 2.0 * rr + 1e-9, || format!("h(F, G) = {gap} > 2r = {}", 2.0 * rr))?;
        }
        let bound = (rbig / (rbig - rr) * f.lip_bound).max(f.lip_bound + rho / rr);
        let est = estimate_lip(&h, 2000, 7300 + i as u64, true).unwrap().ratio;
        ensure(est <= bound + 1e-6, || format!("estimate_lip {est} > {bound}"))?;
    }
    Ok(format!("bump Lipschitz {lip:.6} <= {lip_bound:.6}; max h(F, G) / r = {worst_gap:.3}"))
}

fn c8_contractions() -> Check {
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_residual = 0.0f64;
    for i in 0..20u64 {
        let g = random_affine(8000 + i, NormSpec::Euclidean);
        let gamma = 0.05 + 0.04 * i as f64;
        let f = densify_contraction(&g, gamma, &ConvexPolytope::cube(&[-0.2, -0.2], &[0.1, 0.3])).unwrap();
        ensure(f.lip_bound <= 0.9, || format!("map {i}: lip {}", f.lip_bound))?;
        let mut r = rng(8100 + i);
        let x0 = point_in_polytope(&mut r, &f.domain);
        let t = run_trajectory(&f, &x0, NormSpec::Euclidean, 10_000, DEFAULT_FIX_TOL, DEFAULT_BRANCH_TOL)
            .map_err(|e| e.to_string())?;
        ensure(t.status == TrajectoryStatus::FixedPoint, || format!("map {i}: {:?}", t.status))?;
        ensure(t.fixed_residual <= 1e-8, || format!("map {i}: residual {:e}", t.fixed_residual))?;
        worst_residual = worst_residual.max(t.fixed_residual);
        for w in t.steps.windows(2) {
            if w[0].step_norm > 0.0 && w[1].step_norm > 0.0 {
                let ratio = w[1].step_norm / w[0].step_norm;
                worst_ratio = worst_ratio.max(ratio - f.lip_bound);
                ensure(ratio <= f.lip_bound + 1e-6, || format!("map {i}: step ratio {ratio} > {}", f.lip_bound))?;
            }
        }
    }
    Ok(format!("max residual {worst_residual:.3e}; max ratio - lip {worst_ratio:.3e}"))
}

fn c9_genericity() -> Check {
    let cfg = fixtures().join("genericity_desk.json");
    let f: SetValuedMap = serde_json::from_value(input(&cfg, "map")).unwrap();
    f.validate().map_err(|e| e.to_string())?;
    let x0 = Point::new(param(&cfg, "x0"));
    let eps: f64 = param(&cfg, "eps");
    let n: usize = param(&cfg, "n");
    let trials: usize = param(&cfg, "trials");
    let seed: u64 = serde_json::from_value(read_json(&cfg)["global"]["seed"].clone()).unwrap();
    ensure(f.dim() == 2 && n == 3 && eps == 0.1 && trials == 100, || "fixture parameters changed".into())?;
    let opts = InductionOptions {
        seed,
        ..InductionOptions::for_dim(f.dim())
    };
    let run = || genericity_construct_with(&f, &x0, eps, n, f.norm, trials, &opts, &mut |_| {});
    let cert = run().map_err(|e| e.to_string())?;
    ensure(cert.all_passed, || format!("max face diameter {}", cert.max_observed_face_diam))?;
    ensure(cert.d_inf_f_g < eps, || format!("d_inf(F, G) = {}", cert.d_inf_f_g))?;
    let first = serde_json::to_string(&cert).unwrap();
    let second = serde_json::to_string(&run().map_err(|e| e.to_string())?).unwrap();
    ensure(first == second, || "rerun is not byte-identical".into())?;
    Ok(format!(
        "all_passed, d_inf(F, G) = {:.3e}, r = {:.3e}, delta = {:.3e}, {} trials",
        cert.d_inf_f_g, cert.r, cert.delta, cert.trials
    ))
}

fn c10_branching() -> Check {
    let cfg = fixtures().join("trajectory_linf_branching.json");
    let f: SetValuedMap = serde_json::from_value(input(&cfg, "map")).unwrap();
    f.validate().map_err(|e| e.to_string())?;
    ensure(f.norm == NormSpec::Linf, || "fixture norm is not linf".into())?;
    let x0 = Point::new(param(&cfg, "x0"));
    let t = run_trajectory(&f, &x0, f.norm, param(&cfg, "max_iter"), DEFAULT_FIX_TOL, DEFAULT_BRANCH_TOL)
        .map_err(|e| e.to_string())?;
    let TrajectoryStatus::Branched(k) = t.status else {
        return Err(format!("status {:?}", t.status));
    };
    let diam = t.steps[k].face.face_diameter;
    ensure((diam - 1.0).abs() <= 1e-6, || format!("face diameter {diam}"))?;
    let seg = f.eval(&t.steps[k].x).unwrap();
    let (a, b) = (&seg.vertices()[0], &seg.vertices()[1]);
    let grid = segment_face_grid(a, b, &t.steps[k].x, NormSpec::Linf, 1000, 1e-12);
    ensure((grid - diam).abs() <= 1e-3, || format!("grid oracle {grid} vs {diam}"))?;
    Ok(format!("branched at step {k}, face diameter {diam}, grid oracle {grid}"))
}

/// Every fixture parses, and its set and map inputs survive a save/load cycle.
fn fixtures_round_trip() -> Check {
    let mut count = 0;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for path in &paths {
        let cfg = read_json(path);
        let text = serde_json::to_string(&cfg).unwrap();
        ensure(serde_json::from_str::<Value>(&text).unwrap() == cfg, || format!("{}", path.display()))?;
        for name in cfg["inputs"].as_object().unwrap().keys() {
            let v = input(path, name);
            let ok = if v.get("kind").is_some() {
                let m: SetValuedMap = serde_json::from_value(v).unwrap();
                serde_json::from_str::<SetValuedMap>(&serde_json::to_string(&m).unwrap()).unwrap() == m
            } else if let Some(inner) = v.get("compact") {
                let s: CompactSet = serde_json::from_value(inner.clone()).unwrap();
                serde_json::from_str::<CompactSet>(&serde_json::to_string(&s).unwrap()).unwrap() == s
            } else {
                let p: ConvexPolytope = serde_json::from_value(v).unwrap();
                serde_json::from_str::<ConvexPolytope>(&serde_json::to_string(&p).unwrap()).unwrap() == p
            };
            ensure(ok, || format!("{} input {name}", path.display()))?;
        }
        count += 1;
    }
    Ok(format!("{count} fixture configs"))
}

fn main() {
    type Criterion = (&'static str, &'static str, Duration, fn() -> Check);
    let criteria: [Criterion; 11] = [
        ("1", "counterexample exactness", Duration::from_secs(1), c1_counterexample),
        ("2", "segment identities", Duration::from_secs(60), c2_segment_identities),
        ("3", "hyperbolicity", Duration::from_secs(60), c3_hyperbolicity),
        ("4", "porosity witness", Duration::from_secs(10), c4_porosity),
        ("5", "klee sandwich and rotundity", Duration::from_secs(120), c5_klee_sandwich),
        ("6", "unique projection on rotund sets", Duration::from_secs(60), c6_unique_projection),
        ("7", "bump and point perturbation", Duration::from_secs(120), c7_operators),
        ("8", "contraction trajectories", Duration::from_secs(60), c8_contractions),
        ("9", "genericity certificate", Duration::from_secs(600), c9_genericity),
        ("10", "linf branching detection", Duration::from_secs(5), c10_branching),
        ("F", "fixtures round-trip", Duration::from_secs(10), fixtures_round_trip),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            if took <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.2?}, budget {budget:.0?}"))
            }
        });
        match result {
            Ok(msg) => println!("PASS {id:>2} {name} ({took:.2?}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {name} ({took:.2?}): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
