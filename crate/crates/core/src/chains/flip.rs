use rand::seq::SliceRandom;
use rand::Rng;

use super::ChainError;
use crate::graph::{within_balance, DualGraph, Plan};

/// `(unit, neighbouring district)` pairs: every way to move one boundary unit.
pub fn flip_proposals(g: &DualGraph, plan: &Plan) -> Vec<(usize, usize)> {
    let assignment = plan.assignment();
    let mut proposals = Vec::new();
    for v in 0..g.node_count() {
        let mut targets: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&u| assignment[u])
            .filter(|&d| d != assignment[v])
            .collect();
        targets.sort_unstable();
        targets.dedup();
        proposals.extend(targets.into_iter().map(|d| (v, d)));
    }
    proposals
}

/// Whether moving `unit` into district `to` keeps the plan valid.
pub fn flip_is_valid(g: &DualGraph, plan: &Plan, unit: usize, to: usize) -> bool {
    let from = plan.district_of(unit);
    if from == to {
        return false;
    }
    let (k, epsilon, total) = (plan.k(), plan.epsilon(), g.total_population());
    let moved = g.population(unit);
    let pops = plan.district_populations();
    if !within_balance(pops[from] - moved, total, k, epsilon) || !within_balance(pops[to] + moved, total, k, epsilon) {
        return false;
    }
    let remaining: Vec<usize> = plan.district_members(from).into_iter().filter(|&v| v != unit).collect();
    g.induced_connected(&remaining)
}

/// Applies a flip without re-validating.
pub(crate) fn apply_flip(g: &DualGraph, plan: &Plan, unit: usize, to: usize) -> Plan {
    let from = plan.district_of(unit);
    let mut assignment = plan.assignment().to_vec();
    assignment[unit] = to;
    let mut pops = plan.district_populations().to_vec();
    pops[from] -= g.population(unit);
    pops[to] += g.population(unit);
    Plan::from_parts_unchecked(assignment, plan.k(), plan.epsilon(), plan.ideal_size(), pops)
}

/// Reassigns one boundary unit to an adjacent district.
///
/// Proposals are uniform over `(boundary unit, neighbouring district)` pairs and
/// invalid ones are rejected. Drawing them in a random order without replacement
/// gives the same distribution as repeated rejection sampling and detects the case
/// where no proposal is valid.
pub fn flip_step<R: Rng + ?Sized>(g: &DualGraph, plan: &Plan, rng: &mut R) -> Result<Plan, ChainError> {
    let mut proposals = flip_proposals(g, plan);
    proposals.shuffle(rng);
    proposals
        .into_iter()
        .find(|&(unit, to)| flip_is_valid(g, plan, unit, to))
        .map(|(unit, to)| apply_flip(g, plan, unit, to))
        .ok_or(ChainError::NoValidFlip)
}
