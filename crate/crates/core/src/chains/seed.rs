use rand::seq::SliceRandom;
use rand::Rng;

use super::tree::{random_spanning_tree, RootedTree};
use super::ChainError;
use crate::graph::{validate_plan, DualGraph, Plan};

/// `population` within `[(1-ε)·m·T, (1+ε)·m·T]` for `m` districts of ideal size `T = total/k`.
fn fits(population: u64, districts: usize, total: u64, k: usize, epsilon: f64) -> bool {
    let scaled = population as f64 * k as f64;
    let span = districts as f64 * total as f64;
    scaled >= (1.0 - epsilon) * span && scaled <= (1.0 + epsilon) * span
}

/// Initial plan by recursive spanning-tree bipartition: one balanced district is
/// cut off the remaining region at a time. Each attempt draws up to `trees_per_district`
/// trees per district before starting over, for at most `attempts` restarts.
pub fn recursive_tree_partition<R: Rng + ?Sized>(
    g: &DualGraph,
    k: usize,
    epsilon: f64,
    rng: &mut R,
    attempts: usize,
) -> Result<Plan, ChainError> {
    let total = g.total_population();
    let populations = g.populations();
    let trees_per_district = 1000;
    'attempt: for _ in 0..attempts {
        let mut assignment = vec![usize::MAX; g.node_count()];
        let mut remaining: Vec<usize> = (0..g.node_count()).collect();
        for district in 0..k - 1 {
            let left_after = k - district - 1;
            let mut placed = false;
            for _ in 0..trees_per_district {
                let tree = random_spanning_tree(g, &remaining, rng)?;
                let Some(rooted) = RootedTree::new(&tree) else {
                    break;
                };
                let below = rooted.candidates(&populations, |b, a| {
                    fits(b, 1, total, k, epsilon) && fits(a, left_after, total, k, epsilon)
                });
                let above = rooted.candidates(&populations, |b, a| {
                    fits(a, 1, total, k, epsilon) && fits(b, left_after, total, k, epsilon)
                });
                let options: Vec<(usize, bool)> = below
                    .into_iter()
                    .map(|u| (u, true))
                    .chain(above.into_iter().map(|u| (u, false)))
                    .collect();
                let Some(&(u, district_below)) = options.choose(rng) else {
                    continue;
                };
                let cut = rooted.cut_at(u);
                let (district_units, rest) = if district_below {
                    (cut.side, cut.rest)
                } else {
                    (cut.rest, cut.side)
                };
                for &v in &district_units {
                    assignment[v] = district;
                }
                remaining = rest;
                placed = true;
                break;
            }
            if !placed {
                continue 'attempt;
            }
        }
        for &v in &remaining {
            assignment[v] = k - 1;
        }
        if let Ok(plan) = validate_plan(g, assignment, k, epsilon) {
            return Ok(plan);
        }
    }
    Err(ChainError::SeedingFailed { k, epsilon })
}
