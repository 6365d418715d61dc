use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;

use super::{canonical_class, DistrictGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub k: usize,
    pub edges: usize,
    /// `None` for disconnected graphs.
    pub diameter: Option<usize>,
    pub max_degree: usize,
    pub mean_degree: f64,
    /// `|E| / C(k, 2)`; zero when `k < 2`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// Left edges of equal-width bins; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0; bins];
        for &v in values {
            let b = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self {
            edges: (0..bins).map(|i| lo + i as f64 * width).collect(),
            width,
            counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleGraphStats {
    pub graphs: Vec<GraphSummary>,
    /// Diameter value → number of graphs.
    pub diameter_counts: BTreeMap<usize, usize>,
    pub max_degree_counts: BTreeMap<usize, usize>,
    pub mean_degree_histogram: Histogram,
    pub density_histogram: Histogram,
}

pub fn summarize(dg: &DistrictGraph) -> GraphSummary {
    let k = dg.k();
    let degrees: Vec<usize> = dg.adjacency().iter().map(Vec::len).collect();
    let possible = k * k.saturating_sub(1) / 2;
    GraphSummary {
        k,
        edges: dg.edge_count(),
        diameter: diameter(dg.adjacency()),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        mean_degree: if k == 0 {
            0.0
        } else {
            degrees.iter().sum::<usize>() as f64 / k as f64
        },
        density: if possible == 0 {
            0.0
        } else {
            dg.edge_count() as f64 / possible as f64
        },
    }
}

fn diameter(adjacency: &[Vec<usize>]) -> Option<usize> {
    let n = adjacency.len();
    let mut best = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    best = best.max(dist[v]);
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        if reached != n {
            return None;
        }
    }
    Some(best)
}

pub fn graph_statistics(dgs: &[DistrictGraph]) -> EnsembleGraphStats {
    let graphs: Vec<GraphSummary> = dgs.iter().map(summarize).collect();
    let mut diameter_counts = BTreeMap::new();
    let mut max_degree_counts = BTreeMap::new();
    for s in &graphs {
        if let Some(d) = s.diameter {
            *diameter_counts.entry(d).or_insert(0) += 1;
        }
        *max_degree_counts.entry(s.max_degree).or_insert(0) += 1;
    }
    let max_k = graphs.iter().map(|s| s.k).max().unwrap_or(1).max(1);
    let mean_degrees: Vec<f64> = graphs.iter().map(|s| s.mean_degree).collect();
    let densities: Vec<f64> = graphs.iter().map(|s| s.density).collect();
    EnsembleGraphStats {
        mean_degree_histogram: Histogram::new(&mean_degrees, 0.0, (max_k - 1).max(1) as f64, 20),
        density_histogram: Histogram::new(&densities, 0.0, 1.0, 20),
        graphs,
        diameter_counts,
        max_degree_counts,
    }
}

/// How many distinct isomorphism classes an ensemble of district graphs covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarietyReport {
    pub total: usize,
    pub distinct_classes: usize,
    /// Graphs above the canonicalization limit, not counted as classes.
    pub unclassified: usize,
}

pub fn isomorphism_variety(dgs: &[DistrictGraph], limit: usize) -> VarietyReport {
    let mut classes = HashSet::new();
    let mut unclassified = 0;
    for dg in dgs {
        match canonical_class(dg, limit) {
            Ok(key) => {
                classes.insert(key);
            }
            Err(_) => unclassified += 1,
        }
    }
    VarietyReport {
        total: dgs.len(),
        distinct_classes: classes.len(),
        unclassified,
    }
}
