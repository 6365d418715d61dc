//! Exact canonical labeling for small graphs.
//!
//! Individualization-refinement: the ordered partition is refined to an equitable
//! one, the first non-singleton cell is branched on, and the canonical form is the
//! lexicographically largest adjacency matrix over all discrete leaves. Vertices
//! that are twins (same neighbourhood apart from each other) are interchangeable by
//! an automorphism fixing the current partition, so only one of them is branched on.

use serde::{Deserialize, Serialize};

use super::{DistrictGraph, GraphError};

pub const DEFAULT_CANON_LIMIT: usize = 64;

/// Isomorphism-class key: the canonically relabeled adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey {
    n: usize,
    rows: Vec<u64>,
}

impl CanonicalKey {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }
}

pub fn canonical_class(dg: &DistrictGraph, limit: usize) -> Result<CanonicalKey, GraphError> {
    let limit = limit.min(64);
    if dg.k() > limit {
        return Err(GraphError::TooLarge { k: dg.k(), limit });
    }
    Ok(canonical_form(dg.adjacency()))
}

/// Canonical key of a graph with at most 64 vertices given as adjacency lists.
pub fn canonical_form(adjacency: &[Vec<usize>]) -> CanonicalKey {
    let n = adjacency.len();
    assert!(n <= 64, "canonical_form supports at most 64 vertices");
    let adj: Vec<u64> = adjacency
        .iter()
        .map(|nb| nb.iter().fold(0u64, |m, &v| m | (1u64 << v)))
        .collect();
    if n == 0 {
        return CanonicalKey { n, rows: Vec::new() };
    }
    let mut search = Search { adj: &adj, best: None };
    search.descend(vec![(0..n).collect()]);
    CanonicalKey {
        n,
        rows: search.best.expect("at least one leaf"),
    }
}

struct Search<'a> {
    adj: &'a [u64],
    best: Option<Vec<u64>>,
}

impl Search<'_> {
    fn descend(&mut self, partition: Vec<Vec<usize>>) {
        let partition = refine(self.adj, partition);
        let Some(target) = partition.iter().position(|c| c.len() > 1) else {
            let rows = self.relabel(&partition);
            if self.best.as_ref().is_none_or(|b| rows > *b) {
                self.best = Some(rows);
            }
            return;
        };
        let cell = &partition[target];
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let rest: Vec<usize> = cell.iter().copied().filter(|&u| u != v).collect();
            let mut child = Vec::with_capacity(partition.len() + 1);
            child.extend_from_slice(&partition[..target]);
            child.push(vec![v]);
            child.push(rest);
            child.extend_from_slice(&partition[target + 1..]);
            self.descend(child);
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        let (bu, bv) = (1u64 << u, 1u64 << v);
        (self.adj[u] & !bv) == (self.adj[v] & !bu)
    }

    fn relabel(&self, discrete: &[Vec<usize>]) -> Vec<u64> {
        let n = discrete.len();
        let mut label = vec![0usize; n];
        for (i, cell) in discrete.iter().enumerate() {
            label[cell[0]] = i;
        }
        let mut rows = vec![0u64; n];
        for (i, cell) in discrete.iter().enumerate() {
            let v = cell[0];
            let mut nb = self.adj[v];
            while nb != 0 {
                let u = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                rows[i] |= 1u64 << (n - 1 - label[u]);
            }
        }
        rows
    }
}

/// Refines an ordered partition until every cell is equitable with respect to every other.
fn refine(adj: &[u64], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let mut changed = false;
        let mut s = 0;
        while s < cells.len() {
            let splitter = cells[s].iter().fold(0u64, |m, &v| m | (1u64 << v));
            let mut c = 0;
            while c < cells.len() {
                if cells[c].len() > 1 {
                    let mut keyed: Vec<(u32, usize)> = cells[c]
                        .iter()
                        .map(|&v| ((adj[v] & splitter).count_ones(), v))
                        .collect();
                    if keyed.iter().any(|&(d, _)| d != keyed[0].0) {
                        keyed.sort_unstable();
                        let mut parts: Vec<Vec<usize>> = Vec::new();
                        let mut last = None;
                        for (d, v) in keyed {
                            if last != Some(d) {
                                parts.push(Vec::new());
                                last = Some(d);
                            }
                            parts.last_mut().unwrap().push(v);
                        }
                        let added = parts.len() - 1;
                        cells.splice(c..=c, parts);
                        if s > c {
                            s += added;
                        }
                        c += added;
                        changed = true;
                    }
                }
                c += 1;
            }
            s += 1;
        }
        if !changed {
            return cells;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    #[test]
    fn triangle_and_path_differ() {
        let tri = canonical_form(&adjacency(3, &[(0, 1), (1, 2), (0, 2)]));
        let path = canonical_form(&adjacency(3, &[(0, 1), (1, 2)]));
        assert_ne!(tri, path);
        assert_eq!(tri.edge_count(), 3);
    }

    #[test]
    fn relabeling_preserves_key() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)];
        let perm = [3, 0, 4, 1, 2];
        let relabeled: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        assert_eq!(
            canonical_form(&adjacency(5, &edges)),
            canonical_form(&adjacency(5, &relabeled))
        );
    }

    #[test]
    fn eleven_classes_on_four_vertices() {
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|a| ((a + 1)..4).map(move |b| (a, b))).collect();
        let keys: HashSet<CanonicalKey> = (0u32..64)
            .map(|mask| {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                canonical_form(&adjacency(4, &edges))
            })
            .collect();
        assert_eq!(keys.len(), 11);
    }

    #[test]
    fn symmetric_graphs_terminate() {
        let n = 40;
        let complete: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
        let key = canonical_form(&adjacency(n, &complete));
        assert_eq!(key.edge_count(), n * (n - 1) / 2);
        let cycle: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        assert_eq!(canonical_form(&adjacency(n, &cycle)).edge_count(), n);
    }

    #[test]
    fn too_large_is_reported() {
        let dg = DistrictGraph::from_edges(5, vec![(0, 1)]);
        assert!(matches!(
            canonical_class(&dg, 4),
            Err(GraphError::TooLarge { k: 5, limit: 4 })
        ));
    }
}
