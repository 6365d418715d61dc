use std::collections::BTreeSet;

use rand::Rng;

use super::tree::{random_cut, random_spanning_tree};
use super::{ChainConfig, ChainError};
use crate::graph::{within_balance, DualGraph, Plan};

/// Adjacent district pairs `(a, b)`, `a < b`, of a plan.
pub fn adjacent_district_pairs(g: &DualGraph, plan: &Plan) -> Vec<(usize, usize)> {
    let assignment = plan.assignment();
    let pairs: BTreeSet<(usize, usize)> = g
        .edges()
        .iter()
        .filter_map(|&(u, v)| {
            let (a, b) = (assignment[u], assignment[v]);
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();
    pairs.into_iter().collect()
}

/// One recombination move: merge a uniformly chosen adjacent district pair, draw a
/// uniform spanning tree of the union and cut it at a uniformly chosen balanced edge.
///
/// A pair gets `max_resplit_attempts` trees before a new pair is drawn; the whole
/// step gives up after `max_proposals` trees.
pub fn recom_step<R: Rng + ?Sized>(
    g: &DualGraph,
    plan: &Plan,
    rng: &mut R,
    cfg: &ChainConfig,
) -> Result<Plan, ChainError> {
    let pairs = adjacent_district_pairs(g, plan);
    if pairs.is_empty() {
        return Err(ChainError::StepExhausted { proposals: 0 });
    }
    let total = g.total_population();
    let (k, epsilon) = (plan.k(), plan.epsilon());
    let populations = g.populations();
    let accept = |p: u64| within_balance(p, total, k, epsilon);
    let mut proposals = 0usize;
    loop {
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        let region: Vec<usize> = plan
            .assignment()
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == a || d == b)
            .map(|(v, _)| v)
            .collect();
        for _ in 0..cfg.max_resplit_attempts {
            if proposals >= cfg.max_proposals {
                return Err(ChainError::StepExhausted { proposals });
            }
            proposals += 1;
            let tree = random_spanning_tree(g, &region, rng)?;
            let Some(cut) = random_cut(&tree, &populations, accept, rng) else {
                continue;
            };
            // the side keeps whichever label most of its units already carried
            let from_a = cut.side.iter().filter(|&&v| plan.district_of(v) == a).count();
            let (side_label, rest_label) = if 2 * from_a >= cut.side.len() { (a, b) } else { (b, a) };
            let mut assignment = plan.assignment().to_vec();
            for &v in &cut.side {
                assignment[v] = side_label;
            }
            for &v in &cut.rest {
                assignment[v] = rest_label;
            }
            let mut district_populations = plan.district_populations().to_vec();
            district_populations[side_label] = cut.side.iter().map(|&v| populations[v]).sum();
            district_populations[rest_label] = cut.rest.iter().map(|&v| populations[v]).sum();
            return Ok(Plan::from_parts_unchecked(
                assignment,
                k,
                epsilon,
                plan.ideal_size(),
                district_populations,
            ));
        }
    }
}
