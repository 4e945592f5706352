use betti_core::complex::{vr_complex, MaxDim, SimplicialComplex};
use betti_core::homology::{betti, betti_numbers, betti_oracle_bruteforce, euler_characteristic, InvariantSpec};
use betti_core::manifold::{sample, ManifoldModel};
use betti_core::union_find::UnionFind;
use proptest::prelude::*;

fn full(n: usize, facets: &[&[u32]]) -> SimplicialComplex {
    SimplicialComplex::from_facets(n, facets.iter().map(|f| f.to_vec()), MaxDim::Full).unwrap()
}

#[test]
fn octahedron_is_a_sphere() {
    // antipodal pairs (0,1), (2,3), (4,5)
    let mut facets = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                facets.push(vec![a, b, c]);
            }
        }
    }
    let c = SimplicialComplex::from_facets(6, facets, MaxDim::Full).unwrap();
    assert_eq!(betti_numbers(&c).unwrap(), vec![1, 0, 1]);
    assert_eq!(euler_characteristic(&c).unwrap(), 2);
}

#[test]
fn seven_vertex_torus() {
    let facets: Vec<Vec<u32>> = (0..7u32)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    let c = SimplicialComplex::from_facets(7, facets, MaxDim::Full).unwrap();
    assert_eq!((c.count(0), c.count(1), c.count(2)), (7, 21, 14));
    assert_eq!(betti_numbers(&c).unwrap(), vec![1, 2, 1]);
    assert_eq!(euler_characteristic(&c).unwrap(), 0);
}

#[test]
fn projective_plane_over_gf2() {
    let c = full(
        6,
        &[
            &[0, 1, 2], &[0, 2, 3], &[0, 3, 4], &[0, 4, 5], &[0, 1, 5],
            &[1, 2, 4], &[2, 3, 5], &[1, 3, 4], &[2, 4, 5], &[1, 3, 5],
        ],
    );
    assert_eq!(betti_numbers(&c).unwrap(), vec![1, 1, 1]);
    assert_eq!(euler_characteristic(&c).unwrap(), 1);
    for i in 0..3 {
        assert_eq!(betti(&c, i).unwrap(), betti_oracle_bruteforce(&c, i).unwrap());
    }
}

#[test]
fn bouquet_of_circles() {
    let c = full(7, &[&[0, 1], &[1, 2], &[0, 2], &[0, 3], &[3, 4], &[0, 4], &[5, 6]]);
    assert_eq!(betti_numbers(&c).unwrap(), vec![2, 2]);
}

#[test]
fn dense_circle_complexes_have_one_loop() {
    for n in [60, 120] {
        let pts: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let s = betti_core::manifold::PointSample::circle(&pts).unwrap();
        let c = vr_complex(&s, 3.5 / n as f64, MaxDim::Dim(2)).unwrap();
        assert_eq!(betti(&c, 0).unwrap(), 1);
        assert_eq!(betti(&c, 1).unwrap(), 1);
    }
}

fn union_find_components(s: &betti_core::manifold::PointSample, t: f64) -> usize {
    let mut uf = UnionFind::new(s.len());
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s.distance(i, j) <= t {
                uf.union(i, j);
            }
        }
    }
    uf.components()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduction_matches_dense_elimination(seed in any::<u64>(), n in 1usize..=8, t in 0.0f64..0.5) {
        let s = sample(ManifoldModel::circle(), n, seed, 0).unwrap();
        let c = vr_complex(&s, t, MaxDim::Dim(3)).unwrap();
        for i in 0..=2 {
            prop_assert_eq!(betti(&c, i).unwrap(), betti_oracle_bruteforce(&c, i).unwrap());
        }
    }

    #[test]
    fn euler_poincare_on_full_complexes(seed in any::<u64>(), n in 1usize..=12, t in 0.0f64..0.5, sphere in any::<bool>()) {
        let m = if sphere { ManifoldModel::sphere2() } else { ManifoldModel::circle() };
        let t = if sphere { 2.0 * t } else { t };
        let s = sample(m, n, seed, 1).unwrap();
        let c = vr_complex(&s, t, MaxDim::Full).unwrap();
        let b = betti_numbers(&c).unwrap();
        let alternating: i64 = b.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(euler_characteristic(&c).unwrap(), alternating);
        prop_assert_eq!(InvariantSpec::euler().evaluate(&c).unwrap(), alternating);
    }

    #[test]
    fn b0_counts_components(seed in any::<u64>(), n in 1usize..=40, t in 0.0f64..0.3) {
        let s = sample(ManifoldModel::flat_torus(2).unwrap(), n, seed, 2).unwrap();
        let c = vr_complex(&s, t, MaxDim::Dim(1)).unwrap();
        prop_assert_eq!(betti(&c, 0).unwrap(), union_find_components(&s, t));
    }

    #[test]
    fn random_facet_complexes_match_oracle(facets in prop::collection::vec(prop::collection::btree_set(0u32..9, 1..=4), 1..12)) {
        let c = SimplicialComplex::from_facets(9, facets.into_iter().map(|f| f.into_iter().collect::<Vec<_>>()), MaxDim::Full).unwrap();
        let b = betti_numbers(&c).unwrap();
        for (i, &bi) in b.iter().enumerate() {
            prop_assert_eq!(bi, betti_oracle_bruteforce(&c, i).unwrap());
        }
    }
}
