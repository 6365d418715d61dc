//! Empirical checks of diagram stability under vote and boundary perturbations.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{plan_diagram, AnalysisError};
use crate::assignment::hungarian;
use crate::chains::{chain_rng, flip_step, recom_step, ChainConfig, ChainError};
use crate::graph::{district_graph, DistrictGraph, DualGraph, Election, GraphError, Plan};
use crate::metrics::bottleneck_distance;
use crate::persistence::{sublevel_diagram, Diagram, PersistenceError};

/// Absolute slack for bound comparisons.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("plans have different district counts ({0} vs {1})")]
    KMismatch(usize, usize),
    #[error("plans cover different unit counts")]
    UnitMismatch,
    #[error("plans are not a one-way perturbation of each other")]
    NotOneWay,
    #[error("perturbation changes the district graph")]
    NotGraphPreserving,
    #[error("filtrations have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    OneWay,
    General,
    NotAPerturbation,
}

/// How a second plan differs from a first one after re-indexing its districts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationClass {
    pub kind: PerturbationKind,
    /// The two affected districts `(i, j)` in the first plan's labels. For a
    /// one-way perturbation units move from `i` to `j`.
    pub districts: Option<(usize, usize)>,
    /// `V_ij`: units moving from `i` to `j`.
    pub moved: Vec<usize>,
    /// `V_ji`: units moving from `j` to `i`; empty for one-way perturbations.
    pub moved_back: Vec<usize>,
    pub graph_preserving: bool,
    /// `relabel[d]` is the first plan's label for district `d` of the second plan.
    pub relabel: Vec<usize>,
}

/// Second-plan labels matched to first-plan labels by maximum shared population
/// (shared unit count breaks ties).
pub fn relabel_districts(g: &DualGraph, a: &Plan, b: &Plan) -> Vec<usize> {
    let k = a.k();
    let n = g.node_count() as f64;
    let mut weight = vec![vec![0.0f64; k]; k];
    for v in 0..g.node_count() {
        weight[b.district_of(v)][a.district_of(v)] += g.population(v) as f64 * (n + 1.0) + 1.0;
    }
    let max = weight.iter().flatten().copied().fold(0.0, f64::max);
    let cost: Vec<Vec<f64>> = weight.iter().map(|row| row.iter().map(|w| max - w).collect()).collect();
    hungarian(&cost)
}

fn edge_set(dg: &DistrictGraph, relabel: Option<&[usize]>) -> BTreeSet<(usize, usize)> {
    dg.edges()
        .iter()
        .map(|&(u, v)| match relabel {
            Some(r) => (r[u].min(r[v]), r[u].max(r[v])),
            None => (u, v),
        })
        .collect()
}

pub fn classify_perturbation(a: &Plan, b: &Plan, g: &DualGraph) -> Result<PerturbationClass, StabilityError> {
    if a.k() != b.k() {
        return Err(StabilityError::KMismatch(a.k(), b.k()));
    }
    let n = g.node_count();
    if a.assignment().len() != n || b.assignment().len() != n {
        return Err(StabilityError::UnitMismatch);
    }
    let relabel = relabel_districts(g, a, b);
    let graph_preserving = edge_set(&district_graph(g, a), None) == edge_set(&district_graph(g, b), Some(&relabel));

    let changed: Vec<usize> = (0..n)
        .filter(|&v| a.district_of(v) != relabel[b.district_of(v)])
        .collect();
    let involved: BTreeSet<usize> = changed
        .iter()
        .flat_map(|&v| [a.district_of(v), relabel[b.district_of(v)]])
        .collect();
    let class = |kind, districts, moved, moved_back| PerturbationClass {
        kind,
        districts,
        moved,
        moved_back,
        graph_preserving,
        relabel: relabel.clone(),
    };
    if changed.is_empty() {
        return Ok(class(PerturbationKind::OneWay, None, Vec::new(), Vec::new()));
    }
    if involved.len() != 2 {
        return Ok(class(PerturbationKind::NotAPerturbation, None, Vec::new(), Vec::new()));
    }
    let mut it = involved.into_iter();
    let (x, y) = (it.next().unwrap(), it.next().unwrap());
    let (xy, yx): (Vec<usize>, Vec<usize>) = changed.into_iter().partition(|&v| a.district_of(v) == x);
    Ok(match (xy.is_empty(), yx.is_empty()) {
        (false, true) => class(PerturbationKind::OneWay, Some((x, y)), xy, Vec::new()),
        (true, false) => class(PerturbationKind::OneWay, Some((y, x)), yx, Vec::new()),
        _ => class(PerturbationKind::General, Some((x, y)), xy, yx),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theoretical_bound: f64,
    pub observed_bottleneck: f64,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub satisfied: bool,
}

impl BoundReport {
    fn new(theoretical_bound: f64, observed_bottleneck: f64, alpha: Option<f64>, epsilon: Option<f64>) -> Self {
        Self {
            theoretical_bound,
            observed_bottleneck,
            alpha,
            epsilon,
            satisfied: observed_bottleneck <= theoretical_bound + BOUND_SLACK,
        }
    }
}

/// Compares the bottleneck distance of the diagrams of `f` and `g` with `‖f - g‖∞`.
pub fn vote_stability_check(dg: &DistrictGraph, f: &[f64], g: &[f64]) -> Result<BoundReport, StabilityError> {
    if f.len() != g.len() {
        return Err(StabilityError::LengthMismatch(f.len(), g.len()));
    }
    let df = sublevel_diagram(dg.adjacency(), f)?;
    let dg_ = sublevel_diagram(dg.adjacency(), g)?;
    let sup = f.iter().zip(g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BoundReport::new(sup, bottleneck_distance(&df, &dg_), None, None))
}

/// `2ε / (α(1 - ε))`.
pub fn coefficient(epsilon: f64, alpha: f64) -> f64 {
    2.0 * epsilon / (alpha * (1.0 - epsilon))
}

/// Bound report for a one-way, graph-preserving perturbation, with the pieces
/// that went into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoBound {
    pub report: BoundReport,
    pub class: PerturbationClass,
    pub coefficient: f64,
    /// `max(|f(V_ij) - f(P_i)|, |f(V_ij) - f(P_j)|)`.
    pub share_gap: f64,
}

struct Tally {
    r: f64,
    d: f64,
    pop: f64,
}

impl Tally {
    fn of(g: &DualGraph, units: impl Iterator<Item = usize>, election: &Election) -> Self {
        let mut t = Tally {
            r: 0.0,
            d: 0.0,
            pop: 0.0,
        };
        for v in units {
            let node = g.node(v);
            t.r += node.attribute(&election.republican).unwrap_or(0.0);
            t.d += node.attribute(&election.democratic).unwrap_or(0.0);
            t.pop += node.population as f64;
        }
        t
    }

    fn turnout(&self) -> f64 {
        self.r + self.d
    }

    fn share(&self) -> Option<f64> {
        (self.turnout() > 0.0).then(|| self.r / self.turnout())
    }
}

/// Geographic stability bound for `b` as a perturbation of `a`.
///
/// `α` is the smallest turnout-to-population ratio over the four affected
/// districts before and after the move, unless `alpha_override` is given.
pub fn geo_stability_bound(
    a: &Plan,
    b: &Plan,
    g: &DualGraph,
    election: &Election,
    epsilon: f64,
    alpha_override: Option<f64>,
) -> Result<GeoBound, StabilityError> {
    for name in [&election.republican, &election.democratic] {
        if !g.has_attribute(name) {
            return Err(GraphError::MissingAttribute(name.clone()).into());
        }
    }
    let class = classify_perturbation(a, b, g)?;
    if class.kind != PerturbationKind::OneWay {
        return Err(StabilityError::NotOneWay);
    }
    if !class.graph_preserving {
        return Err(StabilityError::NotGraphPreserving);
    }
    let observed = bottleneck_distance(&plan_diagram(g, a, election)?, &plan_diagram(g, b, election)?);
    let Some((i, j)) = class.districts else {
        let report = BoundReport::new(0.0, observed, alpha_override, Some(epsilon));
        return Ok(GeoBound {
            report,
            class,
            coefficient: alpha_override.map_or(0.0, |al| coefficient(epsilon, al)),
            share_gap: 0.0,
        });
    };
    let moved: BTreeSet<usize> = class.moved.iter().copied().collect();
    let p_i = a.district_members(i);
    let p_j = a.district_members(j);
    let tally = |units: &mut dyn Iterator<Item = usize>| Tally::of(g, units, election);
    let t_pi = tally(&mut p_i.iter().copied());
    let t_pj = tally(&mut p_j.iter().copied());
    let t_pi_after = tally(&mut p_i.iter().copied().filter(|v| !moved.contains(v)));
    let t_pj_after = tally(&mut p_j.iter().copied().chain(moved.iter().copied()));
    let t_moved = tally(&mut moved.iter().copied());

    let alpha = alpha_override.unwrap_or_else(|| {
        [&t_pi, &t_pi_after, &t_pj, &t_pj_after]
            .iter()
            .map(|t| t.turnout() / t.pop)
            .fold(f64::INFINITY, f64::min)
    });
    let coeff = coefficient(epsilon, alpha);
    // moved units without votes leave every district share unchanged
    let share_gap = match (t_moved.share(), t_pi.share(), t_pj.share()) {
        (Some(fv), Some(fi), Some(fj)) => (fv - fi).abs().max((fv - fj).abs()),
        _ => 0.0,
    };
    let bound = coeff * share_gap;
    Ok(GeoBound {
        report: BoundReport::new(bound, observed, Some(alpha), Some(epsilon)),
        class,
        coefficient: coeff,
        share_gap,
    })
}

/// Bottleneck distance to the starting diagram after each of `n_steps` flips.
pub fn flip_trace(
    g: &DualGraph,
    start: &Plan,
    election: &Election,
    n_steps: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>, StabilityError> {
    let origin = plan_diagram(g, start, election)?;
    let mut rng = chain_rng(seed);
    let mut current = start.clone();
    let mut trace = Vec::with_capacity(n_steps);
    for step in 1..=n_steps {
        current = flip_step(g, &current, &mut rng)?;
        let d = plan_diagram(g, &current, election)?;
        trace.push((step, bottleneck_distance(&origin, &d)));
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub steps: usize,
    /// Steps that changed the plan.
    pub changed: usize,
    pub graph_preserving: usize,
    /// `graph_preserving / changed`; `None` when no step changed the plan.
    pub rate: Option<f64>,
}

/// Fraction of plan-changing ReCom steps that keep the district graph.
pub fn recom_preservation_rate(
    g: &DualGraph,
    start: &Plan,
    n_steps: usize,
    cfg: &ChainConfig,
) -> Result<PreservationReport, StabilityError> {
    let mut rng = chain_rng(cfg.rng_seed);
    let mut current = start.clone();
    let (mut changed, mut preserving) = (0, 0);
    for _ in 0..n_steps {
        let next = recom_step(g, &current, &mut rng, cfg)?;
        if next.assignment() != current.assignment() {
            changed += 1;
            if classify_perturbation(&current, &next, g)?.graph_preserving {
                preserving += 1;
            }
        }
        current = next;
    }
    Ok(PreservationReport {
        steps: n_steps,
        changed,
        graph_preserving: preserving,
        rate: (changed > 0).then(|| preserving as f64 / changed as f64),
    })
}

/// Flip drift from several starts against the spread between the starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// One trace of `(step, bottleneck)` per start.
    pub traces: Vec<Vec<(usize, f64)>>,
    /// Last trace value per start.
    pub final_drift: Vec<f64>,
    pub median_drift: f64,
    /// Mean bottleneck distance over all pairs of starting plans.
    pub mean_pairwise: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

/// Runs `n_flips` flips from every start in parallel; start `i` uses seed `seed + i`.
pub fn flip_drift(
    g: &DualGraph,
    starts: &[Plan],
    election: &Election,
    n_flips: usize,
    seed: u64,
) -> Result<DriftReport, StabilityError> {
    let traces = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| flip_trace(g, s, election, n_flips, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let final_drift: Vec<f64> = traces.iter().map(|t| t.last().map_or(0.0, |&(_, d)| d)).collect();
    let diagrams = starts
        .par_iter()
        .map(|s| plan_diagram(g, s, election))
        .collect::<Result<Vec<Diagram<f64>>, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..diagrams.len())
        .flat_map(|i| (i + 1..diagrams.len()).map(move |j| (i, j)))
        .collect();
    let total: f64 = pairs
        .par_iter()
        .map(|&(i, j)| bottleneck_distance(&diagrams[i], &diagrams[j]))
        .sum();
    Ok(DriftReport {
        median_drift: median(&final_drift),
        mean_pairwise: if pairs.is_empty() {
            0.0
        } else {
            total / pairs.len() as f64
        },
        traces,
        final_drift,
    })
}

/// Random connected graph on `k` vertices: a random tree plus each remaining
/// edge with probability `extra_edge_prob`.
pub fn random_district_graph<R: Rng + ?Sized>(k: usize, extra_edge_prob: f64, rng: &mut R) -> DistrictGraph {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut edges: BTreeSet<(usize, usize)> = (1..k)
        .map(|i| {
            let (u, v) = (order[i], order[rng.gen_range(0..i)]);
            (u.min(v), u.max(v))
        })
        .collect();
    for u in 0..k {
        for v in u + 1..k {
            if rng.gen_bool(extra_edge_prob) {
                edges.insert((u, v));
            }
        }
    }
    DistrictGraph::from_edges(k, edges.into_iter().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteSweep {
    pub trials: usize,
    pub violations: usize,
    /// Largest observed bottleneck over `‖f - g‖∞` (0 when the bound is 0).
    pub max_ratio: f64,
}

/// Random `(graph, f, g)` triples with up to `max_k` vertices: `f` uniform in
/// `[0, 1]`, `g` = `f` plus per-vertex noise of at most `max_shift`, clamped.
pub fn vote_stability_sweep(
    trials: usize,
    max_k: usize,
    max_shift: f64,
    seed: u64,
) -> Result<VoteSweep, StabilityError> {
    let mut rng = chain_rng(seed);
    let mut sweep = VoteSweep {
        trials,
        violations: 0,
        max_ratio: 0.0,
    };
    for _ in 0..trials {
        let k = rng.gen_range(1..=max_k.max(1));
        let dg = random_district_graph(k, rng.gen_range(0.0..0.6), &mut rng);
        let f: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let g: Vec<f64> = f
            .iter()
            .map(|x| (x + rng.gen_range(-max_shift..=max_shift)).clamp(0.0, 1.0))
            .collect();
        let r = vote_stability_check(&dg, &f, &g)?;
        if !r.satisfied {
            sweep.violations += 1;
        }
        if r.theoretical_bound > 0.0 {
            sweep.max_ratio = sweep.max_ratio.max(r.observed_bottleneck / r.theoretical_bound);
        }
    }
    Ok(sweep)
}

/// Outcome of walking a flip chain and bounding every qualifying step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoSweep {
    pub steps: usize,
    /// Steps that were graph-preserving one-way perturbations with units moved.
    pub bounded: Vec<GeoBound>,
    pub skipped_not_graph_preserving: usize,
    pub violations: usize,
}

/// Runs `steps` flips from `start`, applying the geographic bound (with `ε` taken
/// from the plan) to every step that satisfies its hypotheses.
pub fn geo_flip_sweep(
    g: &DualGraph,
    start: &Plan,
    election: &Election,
    steps: usize,
    seed: u64,
) -> Result<GeoSweep, StabilityError> {
    let mut rng = chain_rng(seed);
    let mut current = start.clone();
    let mut sweep = GeoSweep {
        steps,
        bounded: Vec::new(),
        skipped_not_graph_preserving: 0,
        violations: 0,
    };
    for _ in 0..steps {
        let next = flip_step(g, &current, &mut rng)?;
        match geo_stability_bound(&current, &next, g, election, current.epsilon(), None) {
            Ok(b) => {
                if !b.report.satisfied {
                    sweep.violations += 1;
                }
                sweep.bounded.push(b);
            }
            Err(StabilityError::NotGraphPreserving) => sweep.skipped_not_graph_preserving += 1,
            Err(e) => return Err(e),
        }
        current = next;
    }
    Ok(sweep)
}
