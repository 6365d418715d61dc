//! Synthetic grid states with city-shaped partisan geography.
//!
//! Vote counts are integers and every unit's two-party turnout is a multiple
//! of 1000 with a Democratic share on the 1/1000 grid, so equal unit shares
//! give bit-identical district shares.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chains::chain_rng;
use crate::graph::{grid_edges, grid_node_id, DualGraph, Election, GraphError, NodeRecord};

pub const REPUBLICAN: &str = "R";
pub const DEMOCRATIC: &str = "D";

/// Election whose votes are stored under [`REPUBLICAN`] and [`DEMOCRATIC`].
pub fn synth_election() -> Election {
    Election::new("SYNTH", REPUBLICAN, DEMOCRATIC)
}

/// A Democratic stronghold: share rises by `dem_intensity` at the centre and
/// decays as `exp(-distance / radius)` in grid (Manhattan) distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub row: usize,
    pub col: usize,
    pub radius: f64,
    pub dem_intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    /// Democratic share away from every city.
    pub base_dem_share: f64,
    /// Half-width of the uniform noise added to each unit's share.
    pub noise: f64,
    pub population: (u64, u64),
    pub turnout: (f64, f64),
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            base_dem_share: 0.42,
            noise: 0.03,
            population: (4000, 6000),
            turnout: (0.45, 0.7),
        }
    }
}

pub fn synth_state(rows: usize, cols: usize, cities: &[City], seed: u64) -> Result<DualGraph, GraphError> {
    synth_state_with(rows, cols, cities, seed, &SynthOptions::default())
}

pub fn synth_state_with(
    rows: usize,
    cols: usize,
    cities: &[City],
    seed: u64,
    opts: &SynthOptions,
) -> Result<DualGraph, GraphError> {
    if rows < 2 || cols < 2 {
        return Err(GraphError::InvalidGrid { rows, cols });
    }
    let mut rng = chain_rng(seed);
    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let population = rng.gen_range(opts.population.0..=opts.population.1);
            let turnout = if opts.turnout.0 < opts.turnout.1 {
                rng.gen_range(opts.turnout.0..opts.turnout.1)
            } else {
                opts.turnout.0
            };
            let noise = if opts.noise > 0.0 {
                rng.gen_range(-opts.noise..opts.noise)
            } else {
                0.0
            };
            let city_pull: f64 = cities
                .iter()
                .map(|city| {
                    let dist = (r.abs_diff(city.row) + c.abs_diff(city.col)) as f64;
                    city.dem_intensity * (-dist / city.radius).exp()
                })
                .sum();
            let share = (opts.base_dem_share + city_pull + noise).clamp(0.02, 0.98);
            let thousands = (turnout * population as f64 / 1000.0).round().max(1.0);
            let dem = thousands * (1000.0 * share).round();
            let votes = thousands * 1000.0;
            nodes.push(
                NodeRecord::new(grid_node_id(r, c), population)
                    .with_attribute(REPUBLICAN, votes - dem)
                    .with_attribute(DEMOCRATIC, dem),
            );
        }
    }
    DualGraph::new(nodes, &grid_edges(rows, cols))
}

/// Copy of `g` with a new election in which every unit's Republican share moved
/// by `delta` at unchanged turnout (clamped to `[0, 1]`).
pub fn with_uniform_swing(
    g: &DualGraph,
    base: &Election,
    delta: f64,
    name: &str,
) -> Result<(DualGraph, Election), GraphError> {
    let election = Election::new(name, format!("{name}_R"), format!("{name}_D"));
    let mut doc = g.to_document();
    for node in &mut doc.nodes {
        let r = node
            .attribute(&base.republican)
            .ok_or_else(|| GraphError::MissingAttribute(base.republican.clone()))?;
        let d = node
            .attribute(&base.democratic)
            .ok_or_else(|| GraphError::MissingAttribute(base.democratic.clone()))?;
        let total = r + d;
        let r_new = (r + delta * total).clamp(0.0, total);
        node.attributes.insert(election.republican.clone(), r_new);
        node.attributes.insert(election.democratic.clone(), total - r_new);
    }
    Ok((DualGraph::from_document(doc)?, election))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::statewide_share;

    #[test]
    fn deterministic_under_seed() {
        let cities = [City {
            row: 1,
            col: 1,
            radius: 1.5,
            dem_intensity: 0.3,
        }];
        let a = synth_state(5, 6, &cities, 7).unwrap();
        let b = synth_state(5, 6, &cities, 7).unwrap();
        assert_eq!(a.to_document(), b.to_document());
        assert_ne!(a.to_document(), synth_state(5, 6, &cities, 8).unwrap().to_document());
        assert_eq!(a.node_count(), 30);
    }

    #[test]
    fn city_centre_is_most_democratic() {
        let cities = [City {
            row: 4,
            col: 4,
            radius: 1.0,
            dem_intensity: 0.4,
        }];
        let opts = SynthOptions {
            noise: 0.0,
            ..SynthOptions::default()
        };
        let g = synth_state_with(9, 9, &cities, 1, &opts).unwrap();
        let share = |id: &str| {
            let n = g.node(g.index_of(id).unwrap());
            let d = n.attribute(DEMOCRATIC).unwrap();
            d / (d + n.attribute(REPUBLICAN).unwrap())
        };
        assert!(share("r4c4") > share("r4c5"));
        assert!(share("r4c5") > share("r0c0"));
    }

    #[test]
    fn swing_shifts_statewide_share() {
        let g = synth_state(4, 4, &[], 3).unwrap();
        let e = synth_election();
        let (g2, e2) = with_uniform_swing(&g, &e, 0.03, "SWING").unwrap();
        let s1 = statewide_share(&g, &e).unwrap();
        let s2 = statewide_share(&g2, &e2).unwrap();
        assert!((s2 - s1 - 0.03).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_grid() {
        assert!(synth_state(1, 5, &[], 0).is_err());
    }
}
