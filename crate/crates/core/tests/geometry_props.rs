mod common;

use common::*;
use proptest::prelude::*;
use setvalued::geometry::{
    distance, hausdorff, hull_equal, hull_reduce, hull_reduce_lp, minkowski_interp, project_point, support,
    ProjectionOptions,
};
use setvalued::random::{point_in_ball, rng};
use setvalued::{CompactSet, ConvexPolytope, NormSpec, Point};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric(seed in any::<u64>(), d in 2usize..4, ni in 0usize..3) {
        let norm = norm_of(ni);
        let (a, b) = random_pair(seed, d);
        let (c, _) = random_pair(seed ^ 0xabc, d);
        let ab = hausdorff(&a, &b, norm).unwrap();
        let ba = hausdorff(&b, &a, norm).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!(hausdorff(&a, &a, norm).unwrap() <= 1e-12);
        let ac = hausdorff(&a, &c, norm).unwrap();
        let cb = hausdorff(&c, &b, norm).unwrap();
        prop_assert!(ab <= ac + cb + 1e-9);
    }

    #[test]
    fn hausdorff_matches_planar_oracle(seed in any::<u64>(), ni in 0usize..3) {
        let norm = norm_of(ni);
        let (a, b) = random_pair(seed, 2);
        let h = hausdorff(&a, &b, norm).unwrap();
        let oracle = hausdorff_2d(&a, &b, norm);
        prop_assert!((h - oracle).abs() <= 1e-9, "{} vs {}", h, oracle);
    }

    #[test]
    fn projection_matches_planar_oracle(seed in any::<u64>(), ni in 0usize..3) {
        let norm = norm_of(ni);
        let (a, _) = random_pair(seed, 2);
        let mut r = rng(seed);
        let x = point_in_ball(&mut r, &Point::zeros(2), 3.0, NormSpec::Euclidean);
        let face = project_point(&a, &x, norm, &ProjectionOptions::default()).unwrap();
        let oracle = dist_2d(&a, &x, norm);
        prop_assert!((face.value - oracle).abs() <= 1e-9);
        prop_assert!((distance(&a, &x, norm).unwrap() - oracle).abs() <= 1e-9);
        prop_assert!(a.contains(&face.witness, 1e-9).unwrap());
        prop_assert!((face.witness.dist(&x, norm) - oracle).abs() <= 1e-9);
        for s in &face.face_samples {
            prop_assert!((s.dist(&x, norm) - oracle).abs() <= 1e-8);
        }
        if norm == NormSpec::Euclidean {
            prop_assert!(face.face_diameter <= 1e-9);
        }
    }

    #[test]
    fn hull_reduction_is_idempotent_and_agrees_with_lp(seed in any::<u64>(), n in 3usize..30) {
        let mut r = rng(seed);
        let pts: Vec<Point> = (0..n).map(|_| point_in_ball(&mut r, &Point::zeros(2), 1.0, NormSpec::Euclidean)).collect();
        let chain = hull_reduce(&pts).unwrap();
        let lp = hull_reduce_lp(&pts).unwrap();
        prop_assert_eq!(chain.vertices().len(), lp.vertices().len());
        prop_assert!(hull_equal(&chain, &lp, 1e-12).unwrap());
        let again = hull_reduce(chain.vertices()).unwrap();
        prop_assert_eq!(again.vertices().len(), chain.vertices().len());
        for q in &pts {
            prop_assert!(chain.contains(q, 1e-9).unwrap());
        }
    }

    #[test]
    fn jittered_boxes_interpolate_like_lp(seed in any::<u64>(), lambda in 0.0f64..=1.0, jitter in 1e-13f64..1e-9) {
        let mut r = rng(seed);
        let mut jittered = |lo: f64, hi: f64| {
            let corners = [p2(lo, lo), p2(hi, lo), p2(hi, hi), p2(lo, hi), p2(lo, 0.5 * (lo + hi))];
            let pts: Vec<Point> = corners
                .iter()
                .map(|c| c + &point_in_ball(&mut r, &Point::zeros(2), jitter, NormSpec::Linf))
                .collect();
            pts
        };
        let a = hull_reduce(&jittered(0.28, 0.49)).unwrap();
        let b = hull_reduce(&jittered(0.29, 0.48)).unwrap();
        let s = minkowski_interp(&a, &b, lambda).unwrap();
        let mut sums = Vec::new();
        for va in a.vertices() {
            for vb in b.vertices() {
                sums.push(va.lerp(vb, lambda));
            }
        }
        let lp = hull_reduce_lp(&sums).unwrap();
        prop_assert!(hausdorff(&s, &lp, NormSpec::Euclidean).unwrap() <= 1e-9);
        let x = point_in_ball(&mut r, &p2(0.4, 0.4), 0.3, NormSpec::Linf);
        for norm in [NormSpec::Linf, NormSpec::L1] {
            let face = project_point(&s, &x, norm, &ProjectionOptions::default()).unwrap();
            prop_assert!((face.value - dist_2d(&s, &x, norm)).abs() <= 1e-8);
        }
        for u in directions(2, 16) {
            let expect = lambda * support_value(&a, &u) + (1.0 - lambda) * support_value(&b, &u);
            prop_assert!((support(&s, &u).unwrap().0 - expect).abs() <= 1e-9);
        }
    }

    #[test]
    fn minkowski_support_is_linear(seed in any::<u64>(), d in 2usize..4, lambda in 0.0f64..=1.0) {
        let (a, b) = random_pair(seed, d);
        let s = minkowski_interp(&a, &b, lambda).unwrap();
        for u in directions(d, 24) {
            let expect = lambda * support_value(&a, &u) + (1.0 - lambda) * support_value(&b, &u);
            let (got, _) = support(&s, &u).unwrap();
            prop_assert!((got - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn translation_invariance(seed in any::<u64>(), d in 2usize..4, ni in 0usize..3) {
        let norm = norm_of(ni);
        let (a, b) = random_pair(seed, d);
        let t = Point::new((0..d).map(|k| 0.37 - 0.11 * k as f64).collect());
        let h = hausdorff(&a, &b, norm).unwrap();
        let ht = hausdorff(&a.translate(&t), &b.translate(&t), norm).unwrap();
        prop_assert!((h - ht).abs() <= 1e-9);
    }

    #[test]
    fn mixed_triangle_inequality(seed in any::<u64>(), d in 2usize..4, ni in 0usize..3) {
        let norm = norm_of(ni);
        let (a, b) = random_pair(seed, d);
        let mut r = rng(seed ^ 1);
        let x = point_in_ball(&mut r, &Point::zeros(d), 2.5, NormSpec::Euclidean);
        let lhs = distance(&a, &x, norm).unwrap();
        let rhs = distance(&b, &x, norm).unwrap() + hausdorff(&b, &a, norm).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn projection_value_matches_grid(seed in any::<u64>(), ni in 0usize..3) {
        let norm = norm_of(ni);
        let a = random_full(seed, 2, 6);
        let mut r = rng(seed ^ 2);
        let x = point_in_ball(&mut r, &Point::zeros(2), 2.5, NormSpec::Euclidean);
        let step = 0.01;
        let mut grid_min = f64::INFINITY;
        for i in -100..=100 {
            for j in -100..=100 {
                let q = p2(i as f64 * step, j as f64 * step);
                if inside_polygon(&q, &a) {
                    grid_min = grid_min.min(q.dist(&x, norm));
                }
            }
        }
        let value = project_point(&a, &x, norm, &ProjectionOptions::default()).unwrap().value;
        // every polygon point has a grid point within one cell, up to the l1 cell diameter
        prop_assert!(value <= grid_min + 1e-12);
        prop_assert!(grid_min <= value + 2.0 * 2.0 * step, "{} {}", value, grid_min);
    }

    #[test]
    fn zero_distance_iff_equal_hulls(seed in any::<u64>(), d in 2usize..4, ni in 0usize..3) {
        let norm = norm_of(ni);
        let (a, b) = random_pair(seed, d);
        let mut pts = a.vertices().to_vec();
        pts.push(a.centroid());
        let a2 = ConvexPolytope::new(&pts).unwrap();
        prop_assert!(hausdorff(&a, &a2, norm).unwrap() <= 1e-9);
        prop_assert!(hull_equal(&a, &a2, 1e-9).unwrap());
        let h = hausdorff(&a, &b, norm).unwrap();
        prop_assert_eq!(h <= 1e-9, hull_equal(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn point_cloud_hausdorff_symmetric(seed in any::<u64>(), ni in 0usize..3) {
        let norm = norm_of(ni);
        let mut r = rng(seed);
        let a: Vec<Point> = (0..5).map(|_| point_in_ball(&mut r, &Point::zeros(2), 1.0, NormSpec::Euclidean)).collect();
        let b: Vec<Point> = (0..4).map(|_| point_in_ball(&mut r, &Point::zeros(2), 1.0, NormSpec::Euclidean)).collect();
        let sa = CompactSet::from_points(&a).unwrap();
        let sb = CompactSet::from_points(&b).unwrap();
        let mut oracle = 0.0f64;
        for (xs, ys) in [(&a, &b), (&b, &a)] {
            for x in xs.iter() {
                oracle = oracle.max(ys.iter().map(|y| x.dist(y, norm)).fold(f64::INFINITY, f64::min));
            }
        }
        prop_assert!((hausdorff(&sa, &sb, norm).unwrap() - oracle).abs() <= 1e-12);
    }
}

#[test]
fn square_to_origin_is_sqrt2() {
    let sq = ConvexPolytope::cube(&[-1.0, -1.0], &[1.0, 1.0]);
    let o = ConvexPolytope::singleton(Point::zeros(2));
    assert!((hausdorff(&sq, &o, NormSpec::Euclidean).unwrap() - 2f64.sqrt()).abs() <= 1e-12);
    assert_eq!(hausdorff(&sq, &o, NormSpec::Linf).unwrap(), 1.0);
    assert_eq!(hausdorff(&sq, &o, NormSpec::L1).unwrap(), 2.0);
}

#[test]
fn linf_segment_face_matches_grid() {
    let a = p2(0.0, 0.0);
    let b = p2(1.0, 0.0);
    let seg = ConvexPolytope::new(&[a.clone(), b.clone()]).unwrap();
    let x = p2(0.5, 1.0);
    let face = project_point(&seg, &x, NormSpec::Linf, &ProjectionOptions::default()).unwrap();
    let grid = segment_face_grid(&a, &b, &x, NormSpec::Linf, 1000, 1e-12);
    assert!((face.face_diameter - 1.0).abs() <= 1e-9);
    assert!((face.face_diameter - grid).abs() <= 1e-3);
}
