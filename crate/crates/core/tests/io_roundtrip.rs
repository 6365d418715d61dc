mod common;

use std::path::Path;

use common::*;
use proptest::prelude::*;
use redist_tda::chains::{run_chain, ChainConfig, ChainKind};
use redist_tda::graph::validate_plan;
use redist_tda::io::{
    diagram_from_csv, diagram_to_csv, matrix_from_csv, matrix_to_csv, read_ensemble, read_graph, write_ensemble,
    write_graph, ExperimentConfig,
};
use redist_tda::persistence::Death;
use redist_tda::synth::synth_state;
use redist_tda::{Diagram, PersistencePoint};

fn point() -> impl Strategy<Value = PersistencePoint> {
    (
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        prop::option::of(-1e6..1e6f64),
        prop::option::of(0..50usize),
    )
        .prop_map(|(birth, death, anchor)| PersistencePoint {
            birth,
            death: death.map_or(Death::Infinite, Death::Finite),
            anchor,
        })
}

proptest! {
    #[test]
    fn diagram_csv_round_trips(points in prop::collection::vec(point(), 0..12)) {
        let d = Diagram::new(points);
        let back = diagram_from_csv(&diagram_to_csv(&d), Path::new("d.csv")).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn matrix_csv_round_trips(n in 1..6usize, values in prop::collection::vec(prop_oneof![Just(f64::INFINITY), 0.0..10.0f64], 36)) {
        let m: Vec<Vec<f64>> = (0..n).map(|i| values[i * n..(i + 1) * n].to_vec()).collect();
        prop_assert_eq!(matrix_from_csv(&matrix_to_csv(&m), Path::new("m.csv")).unwrap(), m);
    }
}

#[test]
fn graph_and_ensemble_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = synth_state(6, 6, &[], 1).unwrap();
    write_graph(&dir.path().join("graph.json"), &g).unwrap();
    let g2 = read_graph(&dir.path().join("graph.json")).unwrap();
    assert_eq!(g.to_document(), g2.to_document());

    let start = validate_plan(&g2, (0..36).map(|v| usize::from(v >= 18)).collect(), 2, 0.2).unwrap();
    let ens = run_chain(&g2, &start, &ChainConfig::new(30, 5, 0.2, 4), ChainKind::Recom).unwrap();
    let manifest = write_ensemble(&dir.path().join("ens"), &g2, &ens).unwrap();
    let (read_manifest, plans) = read_ensemble(&dir.path().join("ens"), &g2).unwrap();
    assert_eq!(manifest, read_manifest);
    assert_eq!(plans, ens.plans);
}

#[test]
fn config_rejects_unknown_fields_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid_graph(2, 2, 1);
    write_graph(&dir.path().join("g.json"), &g).unwrap();
    let good = r#"{"graph": "g.json", "k": 2, "epsilon": 0.1, "elections": [], "rng_seed": 1}"#;
    let bad = r#"{"graph": "g.json", "k": 2, "epsilon": 0.1, "elections": [], "rng_seed": 1, "typo": 3}"#;
    let missing = r#"{"graph": "nope.json", "k": 2, "epsilon": 0.1, "elections": [], "rng_seed": 1}"#;
    for (name, text, ok) in [("good", good, true), ("bad", bad, false), ("missing", missing, false)] {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, text).unwrap();
        assert_eq!(ExperimentConfig::load(&path).is_ok(), ok, "{name}");
    }
    let cfg = ExperimentConfig::load(&dir.path().join("good.json")).unwrap();
    assert_eq!(cfg.graph, dir.path().join("g.json"));
}
