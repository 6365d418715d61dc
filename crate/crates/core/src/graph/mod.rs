//! Unit dual graphs, districting plans and district dual graphs.

mod canon;
mod district;
mod dual;
mod plan;
mod stats;

pub use canon::{canonical_class, canonical_form, CanonicalKey, DEFAULT_CANON_LIMIT};
pub use district::{district_graph, party_share, republican_share, statewide_share, DistrictGraph, Election};
pub use dual::{grid_edges, grid_node_id, DualGraph, GraphDocument, NodeRecord};
pub use plan::{validate_plan, validate_plan_by_id, within_balance, within_target, Plan};
pub use stats::{
    graph_statistics, isomorphism_variety, summarize, EnsembleGraphStats, GraphSummary, Histogram, VarietyReport,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has no nodes")]
    Empty,
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("duplicate edge {0:?}-{1:?}")]
    DuplicateEdge(String, String),
    #[error("self-loop on node {0:?}")]
    SelfLoop(String),
    #[error("edge endpoint {0:?} is not a node")]
    UnknownEdgeEndpoint(String),
    #[error("dual graph is not connected")]
    Disconnected,
    #[error("attribute {attribute:?} of node {node:?} is negative or non-finite ({value})")]
    NegativeAttribute {
        node: String,
        attribute: String,
        value: f64,
    },
    #[error("attribute {0:?} not present")]
    MissingAttribute(String),
    #[error("district {0} has zero two-party turnout")]
    ZeroTurnoutDistrict(usize),
    #[error("graph with {k} vertices exceeds canonicalization limit {limit}")]
    TooLarge { k: usize, limit: usize },
    #[error("malformed graph document: {0}")]
    Parse(String),
    #[error("grid must be at least 2x2, got {rows}x{cols}")]
    InvalidGrid { rows: usize, cols: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("plan needs k >= 2, got {0}")]
    InvalidK(usize),
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("node {0:?} has no district assignment")]
    MissingNode(String),
    #[error("node {node:?} assigned to district {district} outside 0..k")]
    DistrictOutOfRange { node: String, district: usize },
    #[error("district {0} has no units")]
    EmptyDistrict(usize),
    #[error("district {0} is not connected")]
    DistrictDisconnected(usize),
    #[error("district {district} population is {share:.4} of ideal, outside tolerance")]
    PopulationImbalance { district: usize, share: f64 },
}
