mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redist_tda::metrics::{bottleneck_distance, distance_matrix, wasserstein};
use redist_tda::Diagram;

#[test]
fn hungarian_and_bottleneck_match_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..150 {
        let e = rng.gen_range(0..=2);
        let a = random_diagram(rng.gen_range(0..=4), e, &mut rng);
        let b = random_diagram(rng.gen_range(0..=4), e, &mut rng);
        let w2 = wasserstein(&a, &b, 2.0).unwrap().cost;
        assert!((w2 - exhaustive_wasserstein(&a, &b, 2.0)).abs() <= 1e-9);
        let w1 = wasserstein(&a, &b, 1.0).unwrap().cost;
        assert!((w1 - exhaustive_wasserstein(&a, &b, 1.0)).abs() <= 1e-9);
        let binf = bottleneck_distance(&a, &b);
        assert!((binf - exhaustive_wasserstein(&a, &b, f64::INFINITY)).abs() <= 1e-9);
    }
}

#[test]
fn essential_count_mismatch_is_infinite() {
    let a = Diagram::from_pairs(&[(0.1, None), (0.2, Some(0.4))]);
    let b = Diagram::from_pairs(&[(0.1, None), (0.3, None)]);
    let m = wasserstein(&a, &b, 2.0).unwrap();
    assert!(m.essential_mismatch);
    assert!(m.cost.is_infinite());
}

#[test]
fn distance_matrix_is_a_symmetric_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ds: Vec<_> = (0..6)
        .map(|_| random_diagram(rng.gen_range(0..5), 1, &mut rng))
        .collect();
    let m = distance_matrix(&ds, 2.0).unwrap();
    for i in 0..ds.len() {
        assert_eq!(m[i][i], 0.0);
        for j in 0..ds.len() {
            assert!((m[i][j] - m[j][i]).abs() <= 1e-12);
            for l in 0..ds.len() {
                assert!(m[i][l] <= m[i][j] + m[j][l] + 1e-9);
            }
        }
    }
}

#[test]
fn matching_is_a_partial_bijection() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let a = random_diagram(rng.gen_range(0..6), 1, &mut rng);
        let b = random_diagram(rng.gen_range(0..6), 1, &mut rng);
        let m = wasserstein(&a, &b, 2.0).unwrap();
        let mut seen1: Vec<usize> = m
            .pairs
            .iter()
            .map(|p| p.0)
            .chain(m.unmatched1.iter().copied())
            .collect();
        let mut seen2: Vec<usize> = m
            .pairs
            .iter()
            .map(|p| p.1)
            .chain(m.unmatched2.iter().copied())
            .collect();
        seen1.sort();
        seen2.sort();
        assert_eq!(seen1, (0..a.len()).collect::<Vec<_>>());
        assert_eq!(seen2, (0..b.len()).collect::<Vec<_>>());
    }
}
