use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::GraphError;

/// One geographic unit: population plus named nonnegative attributes (vote counts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub population: u64,
    #[serde(default)]
    pub attributes: BTreeMap<String, f64>,
}

impl NodeRecord {
    pub fn new(id: impl Into<String>, population: u64) -> Self {
        Self {
            id: id.into(),
            population,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: f64) -> Self {
        self.attributes.insert(name.into(), value);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<f64> {
        self.attributes.get(name).copied()
    }
}

/// Serialized form of a unit dual graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<[String; 2]>,
}

/// Validated unit dual graph: simple, connected, unique ids, nonnegative attributes.
///
/// Nodes are addressed internally by their position in `nodes()`; ids are only
/// used at the I/O boundary.
#[derive(Debug, Clone)]
pub struct DualGraph {
    nodes: Vec<NodeRecord>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    total_population: u64,
}

impl DualGraph {
    pub fn new<S: AsRef<str>>(nodes: Vec<NodeRecord>, edges: &[(S, S)]) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(node.id.clone()));
            }
            for (name, &value) in &node.attributes {
                if !value.is_finite() || value < 0.0 {
                    return Err(GraphError::NegativeAttribute {
                        node: node.id.clone(),
                        attribute: name.clone(),
                        value,
                    });
                }
            }
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut resolved = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let u = *index
                .get(a)
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(a.to_string()))?;
            let v = *index
                .get(b)
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(b.to_string()))?;
            if u == v {
                return Err(GraphError::SelfLoop(a.to_string()));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(a.to_string(), b.to_string()));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            resolved.push(key);
        }

        let total_population = nodes.iter().map(|n| n.population).sum();
        let graph = Self {
            nodes,
            index,
            edges: resolved,
            adjacency,
            total_population,
        };
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, GraphError> {
        let edges: Vec<(String, String)> = doc.edges.into_iter().map(|[a, b]| (a, b)).collect();
        Self::new(doc.nodes, &edges)
    }

    pub fn from_json_str(json: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument = serde_json::from_str(json).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| [self.nodes[u].id.clone(), self.nodes[v].id.clone()])
                .collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NodeRecord {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Edges as `(u, v)` with `u < v`, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn population(&self, i: usize) -> u64 {
        self.nodes[i].population
    }

    pub fn total_population(&self) -> u64 {
        self.total_population
    }

    pub fn populations(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.population).collect()
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.nodes.iter().all(|n| n.attributes.contains_key(name))
    }

    /// Per-node values of an attribute; missing entries count as zero.
    pub fn attribute_values(&self, name: &str) -> Vec<f64> {
        self.nodes.iter().map(|n| n.attribute(name).unwrap_or(0.0)).collect()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.nodes.len()
    }

    /// Whether the subgraph induced on `members` is connected (empty counts as disconnected).
    pub fn induced_connected(&self, members: &[usize]) -> bool {
        let Some(&start) = members.first() else {
            return false;
        };
        let mut inside = vec![false; self.nodes.len()];
        for &m in members {
            inside[m] = true;
        }
        let mut seen = vec![false; self.nodes.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if inside[v] && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == members.len()
    }
}

/// Edges of a `rows × cols` 4-neighbour grid whose node ids are `r{row}c{col}`.
pub fn grid_edges(rows: usize, cols: usize) -> Vec<(String, String)> {
    let id = |r: usize, c: usize| format!("r{r}c{c}");
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    edges
}

pub fn grid_node_id(row: usize, col: usize) -> String {
    format!("r{row}c{col}")
}
