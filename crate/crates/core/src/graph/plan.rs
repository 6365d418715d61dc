use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DualGraph, PlanError};

/// A districting plan: every unit assigned to one of `k` connected, population-balanced districts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    assignment: Vec<usize>,
    k: usize,
    epsilon: f64,
    ideal_size: f64,
    district_populations: Vec<u64>,
}

/// Whether `population` lies within `[(1-ε)T, (1+ε)T]` for `T = total / k`.
///
/// Compared as `population·k` against `(1±ε)·total` so the ideal size is never rounded.
pub fn within_balance(population: u64, total: u64, k: usize, epsilon: f64) -> bool {
    let scaled = population as f64 * k as f64;
    let total = total as f64;
    scaled >= (1.0 - epsilon) * total && scaled <= (1.0 + epsilon) * total
}

/// Same bound with an explicit ideal size `target`.
pub fn within_target(population: u64, target: f64, epsilon: f64) -> bool {
    let p = population as f64;
    p >= (1.0 - epsilon) * target && p <= (1.0 + epsilon) * target
}

pub fn validate_plan(g: &DualGraph, assignment: Vec<usize>, k: usize, epsilon: f64) -> Result<Plan, PlanError> {
    if k < 2 {
        return Err(PlanError::InvalidK(k));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(PlanError::InvalidEpsilon(epsilon));
    }
    if assignment.len() != g.node_count() {
        let missing = g
            .nodes()
            .get(assignment.len())
            .map(|n| n.id.clone())
            .unwrap_or_default();
        return Err(PlanError::MissingNode(missing));
    }
    let mut members = vec![Vec::new(); k];
    for (node, &district) in assignment.iter().enumerate() {
        if district >= k {
            return Err(PlanError::DistrictOutOfRange {
                node: g.node(node).id.clone(),
                district,
            });
        }
        members[district].push(node);
    }
    for (district, m) in members.iter().enumerate() {
        if m.is_empty() {
            return Err(PlanError::EmptyDistrict(district));
        }
        if !g.induced_connected(m) {
            return Err(PlanError::DistrictDisconnected(district));
        }
    }
    let total = g.total_population();
    let district_populations: Vec<u64> = members
        .iter()
        .map(|m| m.iter().map(|&v| g.population(v)).sum())
        .collect();
    let ideal_size = total as f64 / k as f64;
    for (district, &pop) in district_populations.iter().enumerate() {
        if !within_balance(pop, total, k, epsilon) {
            return Err(PlanError::PopulationImbalance {
                district,
                share: pop as f64 / ideal_size,
            });
        }
    }
    Ok(Plan {
        assignment,
        k,
        epsilon,
        ideal_size,
        district_populations,
    })
}

/// Validates a plan given as `node id → district`.
pub fn validate_plan_by_id(
    g: &DualGraph,
    by_id: &HashMap<String, usize>,
    k: usize,
    epsilon: f64,
) -> Result<Plan, PlanError> {
    let mut assignment = Vec::with_capacity(g.node_count());
    for node in g.nodes() {
        match by_id.get(&node.id) {
            Some(&d) => assignment.push(d),
            None => return Err(PlanError::MissingNode(node.id.clone())),
        }
    }
    validate_plan(g, assignment, k, epsilon)
}

impl Plan {
    /// Builds a plan whose validity the caller has already established (chain moves).
    pub(crate) fn from_parts_unchecked(
        assignment: Vec<usize>,
        k: usize,
        epsilon: f64,
        ideal_size: f64,
        district_populations: Vec<u64>,
    ) -> Self {
        Self {
            assignment,
            k,
            epsilon,
            ideal_size,
            district_populations,
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn district_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ideal_size(&self) -> f64 {
        self.ideal_size
    }

    pub fn district_populations(&self) -> &[u64] {
        &self.district_populations
    }

    /// Unit indices of each district, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (node, &d) in self.assignment.iter().enumerate() {
            members[d].push(node);
        }
        members
    }

    pub fn district_members(&self, district: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == district)
            .map(|(n, _)| n)
            .collect()
    }

    pub fn to_id_map(&self, g: &DualGraph) -> HashMap<String, usize> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(n, &d)| (g.node(n).id.clone(), d))
            .collect()
    }

    /// Same plan with a new epsilon, re-checking balance.
    pub fn with_epsilon(&self, g: &DualGraph, epsilon: f64) -> Result<Plan, PlanError> {
        validate_plan(g, self.assignment.clone(), self.k, epsilon)
    }
}
