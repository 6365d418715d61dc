//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use redist_tda::graph::{grid_edges, grid_node_id, DistrictGraph, DualGraph, NodeRecord};
use redist_tda::persistence::{Death, Diagram, PersistencePoint};

/// Random connected graph: random tree plus extra edges with probability `extra`.
pub fn random_connected<R: Rng>(k: usize, extra: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..k {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        edges.insert((u.min(v), u.max(v)));
    }
    for u in 0..k {
        for v in u + 1..k {
            if rng.gen_bool(extra) {
                edges.insert((u, v));
            }
        }
    }
    edges.into_iter().collect()
}

pub fn adjacency(k: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); k];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

pub fn district_graph(k: usize, edges: &[(usize, usize)]) -> DistrictGraph {
    DistrictGraph::from_edges(k, edges.to_vec())
}

/// Distinct values in `(0, 1)`.
pub fn distinct_values<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let x: f64 = rng.gen_range(0.001..0.999);
        if seen.insert(x.to_bits()) {
            out.push(x);
        }
    }
    out
}

/// Degree-0 diagram straight from the definition: vertex `v` starts a component
/// if it is the minimum of its component when it enters, and that component dies
/// at the first filtration value at which it contains a smaller vertex.
pub fn prefix_component_diagram(adj: &[Vec<usize>], f: &[f64]) -> Vec<(f64, Option<f64>, usize)> {
    let k = f.len();
    let component_of = |v: usize, t: f64| -> Vec<usize> {
        let mut seen = vec![false; k];
        let mut stack = vec![v];
        seen[v] = true;
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &w in &adj[u] {
                if !seen[w] && f[w] <= t {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp
    };
    let mut thresholds = f.to_vec();
    thresholds.sort_by(f64::total_cmp);
    let mut points = Vec::new();
    for v in 0..k {
        if component_of(v, f[v]).iter().any(|&u| f[u] < f[v]) {
            continue;
        }
        let death = thresholds
            .iter()
            .copied()
            .filter(|&t| t >= f[v])
            .find(|&t| component_of(v, t).iter().any(|&u| f[u] < f[v]));
        if death != Some(f[v]) {
            points.push((f[v], death, v));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points
}

pub fn as_triples(d: &Diagram<f64>) -> Vec<(f64, Option<f64>, usize)> {
    let mut v: Vec<_> = d
        .points
        .iter()
        .map(|p| {
            (
                p.birth,
                p.death.finite(),
                p.anchor.expect("computed diagrams are anchored"),
            )
        })
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Random diagram with `finite` finite points and `essential` essential points in `[0, 1]`.
pub fn random_diagram<R: Rng>(finite: usize, essential: usize, rng: &mut R) -> Diagram<f64> {
    let mut pts = Vec::new();
    for _ in 0..finite {
        let b: f64 = rng.gen_range(0.0..0.9);
        let d = rng.gen_range(b..1.0);
        pts.push(PersistencePoint::finite(b, d));
    }
    for _ in 0..essential {
        pts.push(PersistencePoint::essential(rng.gen_range(0.0..1.0)));
    }
    pts.shuffle(rng);
    Diagram::new(pts)
}

fn ground(a: &PersistencePoint<f64>, b: &PersistencePoint<f64>, p: f64) -> f64 {
    match (a.death, b.death) {
        (Death::Finite(x), Death::Finite(y)) => {
            let (db, dd) = ((a.birth - b.birth).abs(), (x - y).abs());
            if p.is_infinite() {
                db.max(dd)
            } else {
                (db.powf(p) + dd.powf(p)).powf(1.0 / p)
            }
        }
        (Death::Infinite, Death::Infinite) => (a.birth - b.birth).abs(),
        _ => f64::INFINITY,
    }
}

fn to_diagonal(a: &PersistencePoint<f64>, p: f64) -> f64 {
    match a.death {
        // distance to ((b+d)/2, (b+d)/2) in the l_p norm
        Death::Finite(d) => {
            let half = (d - a.birth).abs() / 2.0;
            if p.is_infinite() {
                half
            } else {
                (2.0 * half.powf(p)).powf(1.0 / p)
            }
        }
        Death::Infinite => f64::INFINITY,
    }
}

/// Minimum over every partial injection of `d1` into `d2` of the `p`-cost, where
/// unmatched points of either side pay their distance to the diagonal.
pub fn exhaustive_wasserstein(d1: &Diagram<f64>, d2: &Diagram<f64>, p: f64) -> f64 {
    let (a, b) = (&d1.points, &d2.points);
    let mut best = f64::INFINITY;
    let mut used = vec![false; b.len()];
    let mut terms = Vec::new();
    fn combine(terms: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            terms.iter().copied().fold(0.0, f64::max)
        } else {
            terms.iter().map(|t| t.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        a: &[PersistencePoint<f64>],
        b: &[PersistencePoint<f64>],
        p: f64,
        used: &mut Vec<bool>,
        terms: &mut Vec<f64>,
        best: &mut f64,
    ) {
        if i == a.len() {
            let mut all = terms.clone();
            for (j, q) in b.iter().enumerate() {
                if !used[j] {
                    all.push(to_diagonal(q, p));
                }
            }
            *best = best.min(combine(&all, p));
            return;
        }
        terms.push(to_diagonal(&a[i], p));
        go(i + 1, a, b, p, used, terms, best);
        terms.pop();
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                terms.push(ground(&a[i], &b[j], p));
                go(i + 1, a, b, p, used, terms, best);
                terms.pop();
                used[j] = false;
            }
        }
    }
    go(0, a, b, p, &mut used, &mut terms, &mut best);
    best
}

pub fn grid_graph(rows: usize, cols: usize, population: u64) -> DualGraph {
    let nodes = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| NodeRecord::new(grid_node_id(r, c), population)))
        .collect();
    DualGraph::new(nodes, &grid_edges(rows, cols)).unwrap()
}

/// Brute-force isomorphism test over all vertex permutations.
pub fn isomorphic(k: usize, e1: &[(usize, usize)], e2: &[(usize, usize)]) -> bool {
    if e1.len() != e2.len() {
        return false;
    }
    let target: BTreeSet<(usize, usize)> = e2.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let mut perm: Vec<usize> = (0..k).collect();
    fn next_permutation(p: &mut [usize]) -> bool {
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
    loop {
        let mapped: BTreeSet<(usize, usize)> = e1
            .iter()
            .map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v])))
            .collect();
        if mapped == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

/// Synthetic state with two cities and a short ReCom ensemble on it.
pub fn small_ensemble(
    rows: usize,
    cols: usize,
    k: usize,
    steps: usize,
    interval: usize,
    seed: u64,
) -> (DualGraph, Vec<redist_tda::graph::Plan>) {
    use redist_tda::chains::{chain_rng, recursive_tree_partition, run_chain, ChainConfig, ChainKind};
    use redist_tda::synth::{synth_state, City};
    let cities = [
        City {
            row: 1,
            col: 1,
            radius: 1.5,
            dem_intensity: 0.35,
        },
        City {
            row: rows - 2,
            col: cols - 2,
            radius: 2.0,
            dem_intensity: 0.25,
        },
    ];
    let g = synth_state(rows, cols, &cities, seed).unwrap();
    let start = recursive_tree_partition(&g, k, 0.1, &mut chain_rng(seed ^ 1), 100).unwrap();
    let ens = run_chain(
        &g,
        &start,
        &ChainConfig::new(steps, interval, 0.1, seed),
        ChainKind::Recom,
    )
    .unwrap();
    (g, ens.plans)
}
