use rayon::prelude::*;

use super::AnalysisError;
use crate::graph::Plan;
use crate::metrics::wasserstein;
use crate::persistence::{Death, Diagram, PersistencePoint};
use crate::scalar::cmp_scalar;

/// A diagram point tagged with the plan it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayPoint {
    pub plan: usize,
    pub point: PersistencePoint<f64>,
}

/// Pools all points of all diagrams.
pub fn overlay(diagrams: &[Diagram<f64>]) -> Vec<OverlayPoint> {
    diagrams
        .iter()
        .enumerate()
        .flat_map(|(plan, d)| d.points.iter().map(move |&point| OverlayPoint { plan, point }))
        .collect()
}

/// Points with `d - b >= min_persistence`, essential ones first, then by decreasing persistence.
pub fn select_features(mean: &Diagram<f64>, min_persistence: f64) -> Vec<PersistencePoint<f64>> {
    let mut features: Vec<PersistencePoint<f64>> = mean
        .points
        .iter()
        .filter(|p| p.persistence() >= min_persistence)
        .map(|p| p.geometric())
        .collect();
    features.sort_by(|a, b| {
        b.is_essential()
            .cmp(&a.is_essential())
            .then_with(|| cmp_scalar(&b.persistence(), &a.persistence()))
            .then_with(|| cmp_scalar(&a.birth, &b.birth))
    });
    features
}

/// The diagram point that a feature was matched to in one plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    /// Index into that plan's diagram.
    pub point_index: usize,
    pub birth: f64,
    pub death: Death<f64>,
    /// District whose appearance created the component.
    pub anchor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedEnsemble {
    pub features: Vec<PersistencePoint<f64>>,
    /// `labels[plan][feature]`.
    pub labels: Vec<Vec<Option<Label>>>,
}

impl MarkedEnsemble {
    pub fn plan_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labeled_count(&self, feature: usize) -> usize {
        self.labels.iter().filter(|l| l[feature].is_some()).count()
    }

    /// Fraction of plans in which the feature received a label.
    pub fn label_rate(&self, feature: usize) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.labeled_count(feature) as f64 / self.labels.len() as f64
        }
    }

    /// One `(plan, label)` per plan that labelled the feature.
    pub fn feature_points(&self, feature: usize) -> Vec<(usize, Label)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(plan, l)| l[feature].map(|label| (plan, label)))
            .collect()
    }
}

/// Labels the features in every diagram through an optimal `p = 2` matching.
pub fn mark(diagrams: &[Diagram<f64>], features: &[PersistencePoint<f64>]) -> Result<MarkedEnsemble, AnalysisError> {
    if features.is_empty() {
        return Err(AnalysisError::NoFeatures);
    }
    let feature_diagram = Diagram::new(features.to_vec());
    let labels = diagrams
        .par_iter()
        .map(|d| {
            let m = wasserstein(&feature_diagram, d, 2.0).expect("p = 2 is a valid order");
            (0..features.len())
                .map(|f| {
                    m.partner_of_first(f).map(|j| {
                        let p = d.points[j];
                        Label {
                            point_index: j,
                            birth: p.birth,
                            death: p.death,
                            anchor: p.anchor,
                        }
                    })
                })
                .collect()
        })
        .collect();
    Ok(MarkedEnsemble {
        features: features.to_vec(),
        labels,
    })
}

/// Where a feature lives: per unit, how often it sat in the feature's anchor district.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatMap {
    pub feature: usize,
    /// Plans in which the feature was labelled (the denominator).
    pub labeled_plans: usize,
    pub label_rate: f64,
    /// Per-unit frequency; `None` when the feature was never labelled.
    pub frequency: Option<Vec<f64>>,
}

/// Heat map per feature over the units of the plans' graph.
pub fn localize(marked: &MarkedEnsemble, plans: &[Plan], unit_count: usize) -> Result<Vec<HeatMap>, AnalysisError> {
    if plans.len() != marked.plan_count() {
        return Err(AnalysisError::LengthMismatch {
            what: "plans",
            expected: marked.plan_count(),
            got: plans.len(),
        });
    }
    (0..marked.features.len())
        .map(|feature| {
            let mut counts = vec![0usize; unit_count];
            let mut labeled = 0;
            for (plan_idx, (plan, labels)) in plans.iter().zip(&marked.labels).enumerate() {
                let Some(label) = labels[feature] else {
                    continue;
                };
                let district = label.anchor.ok_or(AnalysisError::MissingAnchor {
                    plan: plan_idx,
                    feature,
                })?;
                labeled += 1;
                for (unit, &d) in plan.assignment().iter().enumerate() {
                    if d == district {
                        counts[unit] += 1;
                    }
                }
            }
            let frequency = (labeled > 0).then(|| counts.iter().map(|&c| c as f64 / labeled as f64).collect());
            Ok(HeatMap {
                feature,
                labeled_plans: labeled,
                label_rate: marked.label_rate(feature),
                frequency,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(pairs: &[(f64, Option<f64>)]) -> Diagram<f64> {
        Diagram::from_pairs(pairs)
    }

    #[test]
    fn overlay_pools_points() {
        let a = diag(&[(0.1, None), (0.2, Some(0.3))]);
        let b = diag(&[(0.1, None), (0.2, Some(0.3)), (0.25, Some(0.6))]);
        let pooled = overlay(&[a, b]);
        assert_eq!(pooled.len(), 5);
        assert_eq!(pooled.iter().filter(|p| p.plan == 1).count(), 3);
    }

    #[test]
    fn feature_selection() {
        let mean = diag(&[(0.3, Some(0.35)), (0.2, None)]);
        assert_eq!(select_features(&mean, 0.1).len(), 1);
        assert_eq!(select_features(&mean, 0.0).len(), 2);
        let mean = diag(&[(0.1, Some(0.2)), (0.3, Some(0.6)), (0.2, None)]);
        let f = select_features(&mean, 0.0);
        assert!(f[0].is_essential());
        assert_eq!(f[1].death, Death::Finite(0.6));
        assert_eq!(f[2].death, Death::Finite(0.2));
    }

    #[test]
    fn marking_identity_and_missing() {
        let features = diag(&[(0.2, None), (0.3, Some(0.7)), (0.4, Some(0.6))]).points;
        let exact = Diagram::new(features.iter().enumerate().map(|(i, p)| p.anchored(i)).collect());
        let missing = diag(&[(0.2, None), (0.3, Some(0.7))]);
        let marked = mark(&[exact, missing], &features).unwrap();
        for f in 0..3 {
            let l = marked.labels[0][f].unwrap();
            assert_eq!(l.point_index, f);
            assert_eq!(l.anchor, Some(f));
        }
        assert!(marked.labels[1][2].is_none());
        assert_eq!(marked.label_rate(2), 0.5);
        assert_eq!(marked.feature_points(2).len(), 1);
    }
}
