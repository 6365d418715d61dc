//! Degree-0 persistent homology of vertex-filtered graphs.
//!
//! Vertices enter in increasing filtration order and an edge enters as soon as
//! both endpoints are present. Components are tracked with a union-find whose
//! roots remember when they were born; on a merge the younger component dies
//! at the current value (Elder Rule) and the oldest one never dies.

mod diagram;
mod union_find;

pub use diagram::{nw_quadrant, Death, Diagram, PersistencePoint};
pub use union_find::ElderUnionFind;

use thiserror::Error;

use crate::graph::DistrictGraph;
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistenceError {
    #[error("district graph has no filtration values")]
    MissingFiltration,
    #[error("expected {expected} filtration values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("filtration value {value} at vertex {vertex} outside [0, 1]")]
    RangeError { vertex: usize, value: f64 },
    #[error("filtered graph is not connected")]
    Disconnected,
}

/// Vertices in strictly increasing filtration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationOrder {
    pub order: Vec<usize>,
    /// `rank[v]` is the position of `v` in `order`.
    pub rank: Vec<usize>,
    /// Some values were equal and the order between them came from vertex indices.
    pub ties_broken: bool,
}

pub fn filtration_order<T: Scalar>(values: &[T]) -> Result<FiltrationOrder, PersistenceError> {
    for (vertex, &v) in values.iter().enumerate() {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(PersistenceError::RangeError {
                vertex,
                value: v.to_f64_lossy(),
            });
        }
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_scalar(&values[a], &values[b]).then(a.cmp(&b)));
    let ties_broken = order.windows(2).any(|w| values[w[0]] == values[w[1]]);
    let mut rank = vec![0; values.len()];
    for (position, &v) in order.iter().enumerate() {
        rank[v] = position;
    }
    Ok(FiltrationOrder {
        order,
        rank,
        ties_broken,
    })
}

/// Diagram of a district graph filtered by its stored filtration.
pub fn persistence_diagram(dg: &DistrictGraph) -> Result<Diagram<f64>, PersistenceError> {
    let values = dg.filtration().ok_or(PersistenceError::MissingFiltration)?;
    sublevel_diagram(dg.adjacency(), values)
}

/// Degree-0 diagram of the sublevel filtration `values` on a connected graph.
pub fn sublevel_diagram<T: Scalar>(adjacency: &[Vec<usize>], values: &[T]) -> Result<Diagram<T>, PersistenceError> {
    if values.len() != adjacency.len() {
        return Err(PersistenceError::LengthMismatch {
            expected: adjacency.len(),
            got: values.len(),
        });
    }
    let FiltrationOrder { order, rank, .. } = filtration_order(values)?;
    let mut components = ElderUnionFind::new(rank.clone());
    let mut points = Vec::with_capacity(values.len());

    for &v in &order {
        let now = values[v];
        for &u in &adjacency[v] {
            if rank[u] >= rank[v] {
                continue;
            }
            if let Some((_, dead)) = components.union(u, v) {
                let birth = values[dead];
                if birth < now {
                    points.push(PersistencePoint::finite(birth, now).anchored(dead));
                }
            }
        }
    }

    let roots: Vec<usize> = (0..values.len()).filter(|&v| components.is_root(v)).collect();
    if roots.len() > 1 {
        return Err(PersistenceError::Disconnected);
    }
    for root in roots {
        points.push(PersistencePoint::essential(values[root]).anchored(root));
    }
    // deterministic output: sort by birth then death
    points.sort_by(diagram::point_order);
    Ok(Diagram {
        points,
        k: values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|i| {
                let mut nb = Vec::new();
                if i > 0 {
                    nb.push(i - 1);
                }
                if i + 1 < n {
                    nb.push(i + 1);
                }
                nb
            })
            .collect()
    }

    #[test]
    fn order_sorts_and_flags_ties() {
        let o = filtration_order(&[0.3, 0.1, 0.2]).unwrap();
        assert_eq!(o.order, vec![1, 2, 0]);
        assert!(!o.ties_broken);
        let o = filtration_order(&[0.2, 0.2]).unwrap();
        assert_eq!(o.order, vec![0, 1]);
        assert!(o.ties_broken);
        assert!(matches!(
            filtration_order(&[0.5, 1.2]),
            Err(PersistenceError::RangeError { vertex: 1, .. })
        ));
        assert!(filtration_order(&[f64::NAN]).is_err());
    }

    #[test]
    fn single_vertex_lives_forever() {
        let d = sublevel_diagram(&[vec![]], &[0.4]).unwrap();
        assert_eq!(d.points, vec![PersistencePoint::essential(0.4).anchored(0)]);
    }

    #[test]
    fn three_path_hand_trace() {
        let d = sublevel_diagram(&path(3), &[0.2, 0.6, 0.4]).unwrap();
        assert_eq!(
            d.points,
            vec![
                PersistencePoint::essential(0.2).anchored(0),
                PersistencePoint::finite(0.4, 0.6).anchored(2),
            ]
        );
    }

    #[test]
    fn local_minimum_anchors_a_point() {
        // star: centre 0 at .7, leaves at .1 .3 .5 .6
        let adj = vec![vec![1, 2, 3, 4], vec![0], vec![0], vec![0], vec![0]];
        let f = [0.7f32, 0.1, 0.3, 0.5, 0.6];
        let d = sublevel_diagram(&adj, &f).unwrap();
        assert_eq!(d.len(), 4);
        for (leaf, &value) in f.iter().enumerate().skip(1) {
            let p = d.points.iter().find(|p| p.anchor == Some(leaf)).unwrap();
            assert_eq!(p.birth, value);
        }
        assert_eq!(d.essential_count(), 1);
    }

    #[test]
    fn ties_produce_no_diagonal_points() {
        let d = sublevel_diagram(&path(4), &[0.5; 4]).unwrap();
        assert_eq!(d.points, vec![PersistencePoint::essential(0.5).anchored(0)]);
    }

    #[test]
    fn disconnected_and_missing_filtration() {
        assert_eq!(
            sublevel_diagram(&[vec![], vec![]], &[0.1, 0.2]),
            Err(PersistenceError::Disconnected)
        );
        let dg = DistrictGraph::from_edges(2, vec![(0, 1)]);
        assert_eq!(persistence_diagram(&dg), Err(PersistenceError::MissingFiltration));
        let d = persistence_diagram(&dg.with_filtration(vec![0.3, 0.2])).unwrap();
        assert_eq!(d.points, vec![PersistencePoint::essential(0.2).anchored(1)]);
    }
}
