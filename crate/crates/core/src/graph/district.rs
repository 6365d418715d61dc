use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{DualGraph, GraphError, Plan};

/// Names the two party attributes of one election.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Election {
    pub name: String,
    pub republican: String,
    pub democratic: String,
}

impl Election {
    pub fn new(name: impl Into<String>, republican: impl Into<String>, democratic: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            republican: republican.into(),
            democratic: democratic.into(),
        }
    }
}

/// Quotient of the unit dual graph under a plan, one vertex per district.
#[derive(Debug, Clone, PartialEq)]
pub struct DistrictGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    populations: Vec<u64>,
    attributes: BTreeMap<String, Vec<f64>>,
    filtration: Option<Vec<f64>>,
}

pub fn district_graph(g: &DualGraph, plan: &Plan) -> DistrictGraph {
    let k = plan.k();
    let assignment = plan.assignment();
    let mut pairs = BTreeSet::new();
    for &(u, v) in g.edges() {
        let (a, b) = (assignment[u], assignment[v]);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let mut attributes: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (node, record) in g.nodes().iter().enumerate() {
        for (name, &value) in &record.attributes {
            attributes.entry(name.clone()).or_insert_with(|| vec![0.0; k])[assignment[node]] += value;
        }
    }
    DistrictGraph::from_edges(k, pairs.into_iter().collect())
        .with_populations(plan.district_populations().to_vec())
        .with_attributes(attributes)
}

impl DistrictGraph {
    /// Bare graph on `k` vertices; duplicate and reversed edges are collapsed.
    pub fn from_edges(k: usize, edges: Vec<(usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); k];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Self {
            k,
            edges,
            adjacency,
            populations: vec![0; k],
            attributes: BTreeMap::new(),
            filtration: None,
        }
    }

    pub fn with_populations(mut self, populations: Vec<u64>) -> Self {
        assert_eq!(populations.len(), self.k);
        self.populations = populations;
        self
    }

    pub fn with_attributes(mut self, attributes: BTreeMap<String, Vec<f64>>) -> Self {
        self.attributes = attributes;
        self
    }

    pub fn with_attribute(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.k);
        self.attributes.insert(name.into(), values);
        self
    }

    /// Copy with the filtration replaced; values are range-checked when a diagram is built.
    pub fn with_filtration(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.k, "one filtration value per district");
        Self {
            filtration: Some(values),
            ..self.clone()
        }
    }

    /// Copy filtered by Republican two-party share for `election`.
    pub fn with_republican_share(&self, election: &Election) -> Result<Self, GraphError> {
        Ok(self.with_filtration(republican_share(self, election)?))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    pub fn populations(&self) -> &[u64] {
        &self.populations
    }

    pub fn attribute(&self, name: &str) -> Option<&[f64]> {
        self.attributes.get(name).map(Vec::as_slice)
    }

    pub fn attributes(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.attributes
    }

    pub fn filtration(&self) -> Option<&[f64]> {
        self.filtration.as_deref()
    }

    pub fn is_connected(&self) -> bool {
        if self.k == 0 {
            return false;
        }
        let mut seen = vec![false; self.k];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.k
    }
}

/// `R_P(i) = r(P_i) / (r(P_i) + d(P_i))` for every district.
pub fn republican_share(dg: &DistrictGraph, election: &Election) -> Result<Vec<f64>, GraphError> {
    party_share(dg, &election.republican, &election.democratic)
}

/// `a / (a + b)` per district for two aggregated attributes.
pub fn party_share(dg: &DistrictGraph, numerator: &str, other: &str) -> Result<Vec<f64>, GraphError> {
    let a = dg
        .attribute(numerator)
        .ok_or_else(|| GraphError::MissingAttribute(numerator.to_string()))?;
    let b = dg
        .attribute(other)
        .ok_or_else(|| GraphError::MissingAttribute(other.to_string()))?;
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&a, &b))| {
            let turnout = a + b;
            if turnout > 0.0 {
                Ok(a / turnout)
            } else {
                Err(GraphError::ZeroTurnoutDistrict(i))
            }
        })
        .collect()
}

/// Statewide two-party Republican share of an election.
pub fn statewide_share(g: &DualGraph, election: &Election) -> Result<f64, GraphError> {
    for name in [&election.republican, &election.democratic] {
        if !g.has_attribute(name) {
            return Err(GraphError::MissingAttribute(name.clone()));
        }
    }
    let r: f64 = g.attribute_values(&election.republican).iter().sum();
    let d: f64 = g.attribute_values(&election.democratic).iter().sum();
    if r + d > 0.0 {
        Ok(r / (r + d))
    } else {
        Err(GraphError::ZeroTurnoutDistrict(0))
    }
}
