mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redist_tda::persistence::{persistence_diagram, sublevel_diagram};

#[test]
fn matches_prefix_components_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let k = rng.gen_range(1..=9);
        let edges = random_connected(k, rng.gen_range(0.0..0.6), &mut rng);
        let f = distinct_values(k, &mut rng);
        let dg = district_graph(k, &edges).with_filtration(f.clone());
        let d = persistence_diagram(&dg).unwrap();
        assert_eq!(as_triples(&d), prefix_component_diagram(&adjacency(k, &edges), &f));
        assert_eq!(d.essential_count(), 1);
    }
}

#[test]
fn path_with_two_minima() {
    // 0.1 - 0.9 - 0.3: the younger minimum dies when the peak enters.
    let adj = vec![vec![1], vec![0, 2], vec![1]];
    let d = sublevel_diagram(&adj, &[0.1, 0.9, 0.3]).unwrap();
    assert_eq!(as_triples(&d), vec![(0.1, None, 0), (0.3, Some(0.9), 2)]);
}

#[test]
fn f32_agrees_with_f64() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let k = rng.gen_range(2..=8);
        let edges = random_connected(k, 0.3, &mut rng);
        let f = distinct_values(k, &mut rng);
        let f32s: Vec<f32> = f.iter().map(|&x| x as f32).collect();
        let adj = adjacency(k, &edges);
        let a = sublevel_diagram(&adj, &f).unwrap();
        let b = sublevel_diagram(&adj, &f32s).unwrap();
        assert_eq!(a.len(), b.len());
        let anchors = |pts: Vec<Option<usize>>| {
            let mut v = pts;
            v.sort();
            v
        };
        assert_eq!(
            anchors(a.points.iter().map(|p| p.anchor).collect()),
            anchors(b.points.iter().map(|p| p.anchor).collect())
        );
    }
}
