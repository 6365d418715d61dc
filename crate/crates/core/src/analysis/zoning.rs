use std::collections::VecDeque;

use super::{AnalysisError, MarkedEnsemble};
use crate::graph::{DistrictGraph, Plan};
use crate::persistence::PersistenceError;

/// Zoning summary for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureZone {
    pub feature: usize,
    /// Plans whose label for this feature lies in the northwest quadrant.
    pub nw_plans: usize,
    /// `nw_plans` over all plans.
    pub nw_fraction: f64,
    /// Cluster size per northwest plan, in plan order.
    pub cluster_sizes: Vec<usize>,
    /// Mean number of districts in the cluster; `None` without northwest plans.
    pub mean_cluster_size: Option<f64>,
    /// Per unit, the fraction of northwest plans in which the unit lies in the cluster.
    pub cluster_heat: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneReport {
    pub features: Vec<FeatureZone>,
}

/// Districts reachable from `anchor` through districts whose filtration value is below `.5`.
pub fn party_cluster(dg: &DistrictGraph, values: &[f64], anchor: usize) -> Vec<usize> {
    let mut seen = vec![false; dg.k()];
    let mut queue = VecDeque::from([anchor]);
    seen[anchor] = true;
    let mut cluster = Vec::new();
    while let Some(d) = queue.pop_front() {
        cluster.push(d);
        for &n in dg.neighbors(d) {
            if !seen[n] && values[n] < 0.5 {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    cluster.sort_unstable();
    cluster
}

/// Maps northwest-quadrant feature labels to connected clusters of districts
/// won by the party whose share is `1 - filtration`.
pub fn zone(marked: &MarkedEnsemble, plans: &[Plan], dgs: &[DistrictGraph]) -> Result<ZoneReport, AnalysisError> {
    let n = marked.plan_count();
    for (what, got) in [("plans", plans.len()), ("district graphs", dgs.len())] {
        if got != n {
            return Err(AnalysisError::LengthMismatch { what, expected: n, got });
        }
    }
    let units = plans.first().map_or(0, |p| p.assignment().len());
    let mut features = Vec::with_capacity(marked.features.len());
    for feature in 0..marked.features.len() {
        let mut cluster_sizes = Vec::new();
        let mut counts = vec![0usize; units];
        for plan_idx in 0..n {
            let Some(label) = marked.labels[plan_idx][feature] else {
                continue;
            };
            if !(label.birth < 0.5 && label.death.greater_than(0.5)) {
                continue;
            }
            let anchor = label.anchor.ok_or(AnalysisError::MissingAnchor {
                plan: plan_idx,
                feature,
            })?;
            let dg = &dgs[plan_idx];
            let values = dg.filtration().ok_or(PersistenceError::MissingFiltration)?;
            if values[anchor] >= 0.5 {
                return Err(AnalysisError::AnchorNotPartyWon {
                    plan: plan_idx,
                    feature,
                    district: anchor,
                    share: values[anchor],
                });
            }
            let cluster = party_cluster(dg, values, anchor);
            cluster_sizes.push(cluster.len());
            let mut in_cluster = vec![false; dg.k()];
            for &d in &cluster {
                in_cluster[d] = true;
            }
            for (unit, &d) in plans[plan_idx].assignment().iter().enumerate() {
                if in_cluster[d] {
                    counts[unit] += 1;
                }
            }
        }
        let nw_plans = cluster_sizes.len();
        let mean_cluster_size = (nw_plans > 0).then(|| cluster_sizes.iter().sum::<usize>() as f64 / nw_plans as f64);
        let cluster_heat = (nw_plans > 0).then(|| counts.iter().map(|&c| c as f64 / nw_plans as f64).collect());
        features.push(FeatureZone {
            feature,
            nw_plans,
            nw_fraction: if n == 0 { 0.0 } else { nw_plans as f64 / n as f64 },
            cluster_sizes,
            mean_cluster_size,
            cluster_heat,
        });
    }
    Ok(ZoneReport { features })
}
