//! Ensemble-level analysis of persistence diagrams: marking features of the
//! Fréchet mean in every plan, localizing them on the map, zoning clusters of
//! party-won districts, and comparing elections or biased ensembles.

mod compare;
mod marking;
mod zoning;

pub use compare::{
    compare_biased, compare_elections, cosine_similarity, BiasReport, ElectionComparison, FeaturePair, MatchingMode,
    SeatSummary,
};
pub use marking::{localize, mark, overlay, select_features, HeatMap, Label, MarkedEnsemble, OverlayPoint};
pub use zoning::{party_cluster, zone, FeatureZone, ZoneReport};

use rayon::prelude::*;
use thiserror::Error;

use crate::frechet::{frechet_mean, stratified_seeds, FrechetError, FrechetOptions, FrechetResult};
use crate::graph::{district_graph, DistrictGraph, DualGraph, Election, GraphError, Plan};
use crate::persistence::{persistence_diagram, Diagram, PersistenceError, PersistencePoint};

/// Features whose label rate falls below this are reported as unstable.
pub const UNSTABLE_LABEL_RATE: f64 = 0.2;

pub const DEFAULT_MIN_PERSISTENCE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Frechet(#[from] FrechetError),
    #[error("no features selected")]
    NoFeatures,
    #[error("every plan was skipped")]
    NoUsablePlans,
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("plan {plan}, feature {feature}: anchor district {district} has share {share} >= 0.5")]
    AnchorNotPartyWon {
        plan: usize,
        feature: usize,
        district: usize,
        share: f64,
    },
    #[error("plan {plan}, feature {feature}: labelled point has no anchor district")]
    MissingAnchor { plan: usize, feature: usize },
    #[error("geographic pairing needs heat maps for both sides")]
    ModeUnavailable,
}

/// District graph of `plan` filtered by the Republican share of `election`.
pub fn filtered_district_graph(g: &DualGraph, plan: &Plan, election: &Election) -> Result<DistrictGraph, GraphError> {
    district_graph(g, plan).with_republican_share(election)
}

/// Persistence diagram of one plan under one election.
pub fn plan_diagram(g: &DualGraph, plan: &Plan, election: &Election) -> Result<Diagram<f64>, AnalysisError> {
    Ok(persistence_diagram(&filtered_district_graph(g, plan, election)?)?)
}

/// Diagrams of every plan, in order; failures are kept per plan.
pub fn ensemble_diagrams(
    g: &DualGraph,
    plans: &[Plan],
    election: &Election,
) -> Vec<Result<Diagram<f64>, AnalysisError>> {
    plans.par_iter().map(|p| plan_diagram(g, p, election)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub min_persistence: f64,
    /// Number of stratified Fréchet seeds; `None` seeds from every diagram.
    pub frechet_seeds: Option<usize>,
    pub frechet: FrechetOptions<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            min_persistence: DEFAULT_MIN_PERSISTENCE,
            frechet_seeds: Some(20),
            frechet: FrechetOptions::default(),
        }
    }
}

impl AnalysisOptions {
    pub fn seeds(&self, n: usize) -> Vec<usize> {
        match self.frechet_seeds {
            Some(count) => stratified_seeds(n, count),
            None => (0..n).collect(),
        }
    }
}

/// Full single-election pipeline over one ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleAnalysis {
    /// Indices into the input plans that produced a diagram.
    pub kept: Vec<usize>,
    /// Plans that were skipped, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub diagrams: Vec<Diagram<f64>>,
    pub district_graphs: Vec<DistrictGraph>,
    pub frechet: FrechetResult<f64>,
    pub features: Vec<PersistencePoint<f64>>,
    pub marked: MarkedEnsemble,
    pub heat_maps: Vec<HeatMap>,
}

impl EnsembleAnalysis {
    pub fn run(
        g: &DualGraph,
        plans: &[Plan],
        election: &Election,
        opts: &AnalysisOptions,
    ) -> Result<Self, AnalysisError> {
        let results: Vec<Result<(DistrictGraph, Diagram<f64>), AnalysisError>> = plans
            .par_iter()
            .map(|p| {
                let dg = filtered_district_graph(g, p, election)?;
                let d = persistence_diagram(&dg)?;
                Ok((dg, d))
            })
            .collect();
        let mut kept = Vec::new();
        let mut skipped = Vec::new();
        let mut diagrams = Vec::new();
        let mut district_graphs = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok((dg, d)) => {
                    kept.push(i);
                    district_graphs.push(dg);
                    diagrams.push(d);
                }
                Err(e) => skipped.push((i, e.to_string())),
            }
        }
        if diagrams.is_empty() {
            return Err(AnalysisError::NoUsablePlans);
        }
        let frechet = frechet_mean(&diagrams, &opts.seeds(diagrams.len()), &opts.frechet)?;
        let features = select_features(&frechet.mean, opts.min_persistence);
        let marked = mark(&diagrams, &features)?;
        let kept_plans: Vec<Plan> = kept.iter().map(|&i| plans[i].clone()).collect();
        let heat_maps = localize(&marked, &kept_plans, g.node_count())?;
        Ok(Self {
            kept,
            skipped,
            diagrams,
            district_graphs,
            frechet,
            features,
            marked,
            heat_maps,
        })
    }
}
