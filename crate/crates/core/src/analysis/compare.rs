use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, AnalysisOptions, EnsembleAnalysis, HeatMap};
use crate::chains::{Party, SafeSeatScorer};
use crate::graph::{DualGraph, Election, Plan};
use crate::metrics::{diagonal_projection, wasserstein};
use crate::persistence::{Death, Diagram, PersistencePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingMode {
    /// Greedy one-to-one pairing by heat-map cosine similarity.
    Geographic,
    /// Optimal `p = 2` Wasserstein matching of the feature sets.
    OptimalL2,
}

/// Displacement of one feature of the first mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaturePair {
    pub a: usize,
    /// Paired feature of the second mean; `None` means the diagonal.
    pub b: Option<usize>,
    pub from: PersistencePoint<f64>,
    /// The paired point, or the diagonal projection of `from`. `None` for an
    /// essential point without an essential partner.
    pub to: Option<PersistencePoint<f64>>,
    pub delta_birth: Option<f64>,
    /// Zero between two essential points; `None` when only one side is essential.
    pub delta_death: Option<f64>,
}

impl FeaturePair {
    fn new(a: usize, b: Option<usize>, from: PersistencePoint<f64>, to: Option<PersistencePoint<f64>>) -> Self {
        let delta_birth = to.map(|t| t.birth - from.birth);
        let delta_death = to.and_then(|t| match (from.death, t.death) {
            (Death::Finite(x), Death::Finite(y)) => Some(y - x),
            (Death::Infinite, Death::Infinite) => Some(0.0),
            _ => None,
        });
        Self {
            a,
            b,
            from,
            to,
            delta_birth,
            delta_death,
        }
    }

    fn to_diagonal(a: usize, from: PersistencePoint<f64>) -> Self {
        let to = from.death.finite().map(|d| {
            let (b, d) = diagonal_projection(from.birth, d);
            PersistencePoint::finite(b, d)
        });
        Self::new(a, None, from, to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectionComparison {
    pub mode: MatchingMode,
    /// One entry per feature of the first mean.
    pub pairs: Vec<FeaturePair>,
    /// Features of the second mean left unpaired.
    pub unpaired_b: Vec<usize>,
    /// Displacement `(δ, δ)` a uniform swing of `δ` would cause.
    pub swing_reference: (f64, f64),
}

impl ElectionComparison {
    pub fn partner(&self, a: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.a == a).and_then(|p| p.b)
    }
}

pub fn cosine_similarity(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        0.0
    } else {
        dot / (nx * ny)
    }
}

fn geographic_pairing(heat_a: &[HeatMap], heat_b: &[HeatMap], na: usize, nb: usize) -> Vec<Option<usize>> {
    let freq = |h: &[HeatMap], i: usize| h.iter().find(|m| m.feature == i).and_then(|m| m.frequency.clone());
    let fa: Vec<_> = (0..na).map(|i| freq(heat_a, i)).collect();
    let fb: Vec<_> = (0..nb).map(|j| freq(heat_b, j)).collect();
    let mut candidates = Vec::new();
    for (i, x) in fa.iter().enumerate() {
        for (j, y) in fb.iter().enumerate() {
            if let (Some(x), Some(y)) = (x, y) {
                let s = cosine_similarity(x, y);
                if s > 0.0 {
                    candidates.push((s, i, j));
                }
            }
        }
    }
    candidates.sort_by(|p, q| q.0.total_cmp(&p.0).then((p.1, p.2).cmp(&(q.1, q.2))));
    let mut partner = vec![None; na];
    let mut used = vec![false; nb];
    for (_, i, j) in candidates {
        if partner[i].is_none() && !used[j] {
            partner[i] = Some(j);
            used[j] = true;
        }
    }
    partner
}

/// Pairs the features of two means and reports how far each moved.
///
/// `swing` is the statewide share difference (second minus first) that sets the
/// uniform-swing reference vector.
pub fn compare_elections(
    features_a: &[PersistencePoint<f64>],
    features_b: &[PersistencePoint<f64>],
    mode: MatchingMode,
    heat_maps: Option<(&[HeatMap], &[HeatMap])>,
    swing: f64,
) -> Result<ElectionComparison, AnalysisError> {
    let partner: Vec<Option<usize>> = match mode {
        MatchingMode::Geographic => {
            let (ha, hb) = heat_maps.ok_or(AnalysisError::ModeUnavailable)?;
            geographic_pairing(ha, hb, features_a.len(), features_b.len())
        }
        MatchingMode::OptimalL2 => {
            let da = Diagram::new(features_a.to_vec());
            let db = Diagram::new(features_b.to_vec());
            let m = wasserstein(&da, &db, 2.0).expect("p = 2 is a valid order");
            (0..features_a.len()).map(|i| m.partner_of_first(i)).collect()
        }
    };
    let pairs = partner
        .iter()
        .enumerate()
        .map(|(a, &b)| match b {
            Some(j) => FeaturePair::new(a, Some(j), features_a[a], Some(features_b[j])),
            None => FeaturePair::to_diagonal(a, features_a[a]),
        })
        .collect();
    let unpaired_b = (0..features_b.len()).filter(|j| !partner.contains(&Some(*j))).collect();
    Ok(ElectionComparison {
        mode,
        pairs,
        unpaired_b,
        swing_reference: (swing, swing),
    })
}

/// Safe seats per plan for both parties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatSummary {
    pub threshold: f64,
    pub democratic: Vec<usize>,
    pub republican: Vec<usize>,
}

impl SeatSummary {
    pub fn compute(g: &DualGraph, plans: &[Plan], election: &Election, threshold: f64) -> Result<Self, AnalysisError> {
        let dem = SafeSeatScorer::new(g, election, Party::Democratic, threshold)?;
        let rep = SafeSeatScorer::new(g, election, Party::Republican, threshold)?;
        Ok(Self {
            threshold,
            democratic: plans.iter().map(|p| dem.score(p)).collect(),
            republican: plans.iter().map(|p| rep.score(p)).collect(),
        })
    }

    pub fn mean(&self, party: Party) -> f64 {
        let seats = self.seats(party);
        if seats.is_empty() {
            0.0
        } else {
            seats.iter().sum::<usize>() as f64 / seats.len() as f64
        }
    }

    pub fn histogram(&self, party: Party) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &s in self.seats(party) {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }

    fn seats(&self, party: Party) -> &[usize] {
        match party {
            Party::Democratic => &self.democratic,
            Party::Republican => &self.republican,
        }
    }
}

/// Comparison of a Democratic-favoring and a Republican-favoring ensemble.
#[derive(Debug, Clone)]
pub struct BiasReport {
    pub dem: EnsembleAnalysis,
    pub rep: EnsembleAnalysis,
    pub dem_seats: SeatSummary,
    pub rep_seats: SeatSummary,
    pub optimal_l2: ElectionComparison,
    pub geographic: ElectionComparison,
    /// Per feature of the Democratic-favoring mean: whether both pairings agree.
    pub agreement: Vec<bool>,
}

pub fn compare_biased(
    g: &DualGraph,
    dem_plans: &[Plan],
    rep_plans: &[Plan],
    election: &Election,
    opts: &AnalysisOptions,
    safe_threshold: f64,
) -> Result<BiasReport, AnalysisError> {
    let dem = EnsembleAnalysis::run(g, dem_plans, election, opts)?;
    let rep = EnsembleAnalysis::run(g, rep_plans, election, opts)?;
    let optimal_l2 = compare_elections(&dem.features, &rep.features, MatchingMode::OptimalL2, None, 0.0)?;
    let geographic = compare_elections(
        &dem.features,
        &rep.features,
        MatchingMode::Geographic,
        Some((&dem.heat_maps, &rep.heat_maps)),
        0.0,
    )?;
    let agreement = (0..dem.features.len())
        .map(|a| optimal_l2.partner(a) == geographic.partner(a))
        .collect();
    Ok(BiasReport {
        dem_seats: SeatSummary::compute(g, dem_plans, election, safe_threshold)?,
        rep_seats: SeatSummary::compute(g, rep_plans, election, safe_threshold)?,
        dem,
        rep,
        optimal_l2,
        geographic,
        agreement,
    })
}
