use approx::assert_relative_eq;
use betti_core::manifold::{
    covering_radius, covering_tail_bound, sample, ManifoldKind, ManifoldModel, PointSample,
};
use proptest::prelude::*;

fn models() -> Vec<ManifoldModel> {
    vec![
        ManifoldModel::circle(),
        ManifoldModel::flat_torus(1).unwrap(),
        ManifoldModel::flat_torus(2).unwrap(),
        ManifoldModel::flat_torus(3).unwrap(),
        ManifoldModel::sphere2(),
    ]
}

#[test]
fn metric_axioms_on_random_triples() {
    for m in models() {
        // 3 * 3400 points give well over 10^4 triples
        let s = sample(m, 3 * 3400, 77, 0).unwrap();
        for k in 0..3400 {
            let (a, b, c) = (3 * k, 3 * k + 1, 3 * k + 2);
            let (ab, bc, ac) = (s.distance(a, b), s.distance(b, c), s.distance(a, c));
            assert!(ac <= ab + bc + 1e-12, "{:?}: {ac} > {ab} + {bc}", m.kind());
            assert_eq!(ab, s.distance(b, a));
            assert_eq!(s.distance(a, a), 0.0);
            assert!(ab >= 0.0 && ab <= m.diameter() + 1e-12);
        }
    }
}

#[test]
fn sphere_distance_matches_arccos() {
    let s = sample(ManifoldModel::sphere2(), 2000, 5, 0).unwrap();
    for i in (0..2000).step_by(2) {
        let (p, q) = (s.point(i), s.point(i + 1));
        let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
        assert!((s.distance(i, i + 1) - dot.clamp(-1.0, 1.0).acos()).abs() < 1e-7);
    }
}

#[test]
fn ball_measure_monotone_and_lipschitz() {
    for m in models() {
        let top = m.ball_measure_domain().min(m.diameter());
        let k = m.ball_measure_lipschitz();
        let grid: Vec<f64> = (0..=2000).map(|i| top * i as f64 / 2000.0).collect();
        let values: Vec<f64> = grid.iter().map(|&t| m.ball_measure(t).unwrap()).collect();
        assert_eq!(values[0], 0.0);
        for (t, v) in grid.windows(2).zip(values.windows(2)) {
            assert!(v[1] >= v[0]);
            assert!(v[1] - v[0] <= k * (t[1] - t[0]) * (1.0 + 1e-9));
            assert!(v[1] <= 1.0 + 1e-12);
        }
    }
    assert_eq!(ManifoldModel::circle().ball_measure(0.5).unwrap(), 1.0);
    assert_relative_eq!(ManifoldModel::sphere2().ball_measure(std::f64::consts::PI).unwrap(), 1.0);
}

#[test]
fn ball_measure_matches_empirical_fraction() {
    for m in models() {
        let t = 0.3f64.min(m.ball_measure_domain());
        let s = sample(m, 40_001, 8, 0).unwrap();
        let inside = (1..s.len()).filter(|&i| s.distance(0, i) <= t).count() as f64 / 40_000.0;
        let p = m.ball_measure(t).unwrap();
        let se = (p * (1.0 - p) / 40_000.0).sqrt();
        assert!((inside - p).abs() <= 5.0 * se + 1e-12, "{:?}: {inside} vs {p}", m.kind());
    }
}

#[test]
fn torus_covering_radius_brackets_fine_grid() {
    let m = ManifoldModel::flat_torus(2).unwrap();
    for seed in 0..5 {
        let s = sample(m, 30, seed, 0).unwrap();
        let coarse = covering_radius(&s, Some(40)).unwrap();
        let fine = covering_radius(&s, Some(400)).unwrap();
        assert!(fine.radius >= coarse.radius - 1e-12);
        assert!(fine.radius <= coarse.radius + coarse.mesh_error + 1e-12);
    }
}

#[test]
fn sphere_covering_radius_brackets_fine_grid() {
    for seed in 0..3 {
        let s = sample(ManifoldModel::sphere2(), 50, seed, 0).unwrap();
        let coarse = covering_radius(&s, Some(30)).unwrap();
        let fine = covering_radius(&s, Some(300)).unwrap();
        assert!(fine.radius <= coarse.radius + coarse.mesh_error + 1e-12);
        assert!(coarse.radius <= fine.radius + fine.mesh_error + 1e-12);
    }
}

#[test]
fn covering_radius_shrinks_along_nested_samples() {
    for m in [ManifoldModel::circle(), ManifoldModel::flat_torus(2).unwrap()] {
        for seed in 0..20 {
            let mut last = f64::INFINITY;
            for n in [5, 10, 20, 40, 80] {
                let s = sample(m, n, seed, 3).unwrap();
                let res = if m.is_circle() { None } else { Some(50) };
                let r = covering_radius(&s, res).unwrap().radius;
                assert!(r <= last);
                last = r;
            }
        }
    }
}

#[test]
fn tail_bound_is_monotone_in_n() {
    let m = ManifoldModel::circle();
    let mut last = 1.0;
    for n in 1..200 {
        let b = covering_tail_bound(m, 0.2, n).unwrap();
        assert!(b <= last && b >= 0.0);
        last = b;
    }
    assert!(last < 1e-15);
}

#[test]
fn nonuniform_point_lists_are_checked() {
    assert!(PointSample::circle(&[0.2, 1.0]).is_err());
    assert!(PointSample::from_coords(ManifoldModel::sphere2(), vec![1.0, 0.0]).is_err());
    assert!(PointSample::from_coords(ManifoldModel::sphere2(), vec![0.0, 0.0, 1.0]).is_ok());
    assert!(ManifoldModel::from_kind(ManifoldKind::FlatTorus { dim: 0 }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn circle_covering_radius_agrees_with_probes(seed in any::<u64>(), n in 1usize..40) {
        let s = sample(ManifoldModel::circle(), n, seed, 0).unwrap();
        let exact = covering_radius(&s, None).unwrap();
        prop_assert_eq!(exact.mesh_error, 0.0);
        let probes = 10_000;
        let probed = (0..probes)
            .map(|i| {
                let y = [(i as f64 + 0.5) / probes as f64];
                s.points()
                    .map(|p| ManifoldModel::circle().geodesic_distance(p, &y).unwrap())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        // probes lower-bound the radius and miss it by at most half a probe step
        prop_assert!(probed <= exact.radius + 1e-12);
        prop_assert!(exact.radius <= probed + 0.5 / probes as f64 + 1e-12);
    }

    #[test]
    fn samples_are_reproducible(seed in any::<u64>(), trial in any::<u64>(), n in 1usize..50) {
        for m in models() {
            let a = sample(m, n, seed, trial).unwrap();
            let b = sample(m, n, seed, trial).unwrap();
            prop_assert_eq!(&a, &b);
            for p in a.points() {
                prop_assert!(m.validate_point(p).is_ok());
            }
        }
    }
}
