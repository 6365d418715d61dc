//! Serializable records for JSON reports. Non-finite numbers are written as the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{
    BiasReport, ElectionComparison, EnsembleAnalysis, FeaturePair, MatchingMode, SeatSummary, ZoneReport,
    UNSTABLE_LABEL_RATE,
};
use crate::chains::Party;
use crate::frechet::FrechetResult;
use crate::metrics::Matching;
use crate::persistence::{Death, PersistencePoint};

/// A float that survives JSON even when infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;
        impl Visitor<'_> for RealVisitor {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(RealVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub birth: f64,
    /// `"inf"` for points that never die.
    pub death: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<usize>,
}

impl From<&PersistencePoint<f64>> for PointRecord {
    fn from(p: &PersistencePoint<f64>) -> Self {
        Self {
            birth: p.birth,
            death: Real(p.death.value()),
            anchor: p.anchor,
        }
    }
}

impl From<PointRecord> for PersistencePoint<f64> {
    fn from(r: PointRecord) -> Self {
        let death = if r.death.0 == f64::INFINITY {
            Death::Infinite
        } else {
            Death::Finite(r.death.0)
        };
        PersistencePoint {
            birth: r.birth,
            death,
            anchor: r.anchor,
        }
    }
}

pub fn point_records(points: &[PersistencePoint<f64>]) -> Vec<PointRecord> {
    points.iter().map(PointRecord::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingRecord {
    pub p: Real,
    pub cost: Real,
    /// `(index in first diagram, index in second diagram)`.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_first: Vec<usize>,
    pub unmatched_second: Vec<usize>,
    pub essential_mismatch: bool,
}

impl From<&Matching<f64>> for MatchingRecord {
    fn from(m: &Matching<f64>) -> Self {
        Self {
            p: Real(m.p),
            cost: Real(m.cost),
            pairs: m.pairs.clone(),
            unmatched_first: m.unmatched1.clone(),
            unmatched_second: m.unmatched2.clone(),
            essential_mismatch: m.essential_mismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetRecord {
    pub mean: Vec<PointRecord>,
    pub functional_value: Real,
    pub seed_id: usize,
    pub iterations: usize,
    pub converged: bool,
    pub functional_trace: Vec<Real>,
    /// `p = 2` distance from the mean to each diagram.
    pub distances: Vec<Real>,
}

impl From<&FrechetResult<f64>> for FrechetRecord {
    fn from(r: &FrechetResult<f64>) -> Self {
        Self {
            mean: point_records(&r.mean.points),
            functional_value: Real(r.functional_value),
            seed_id: r.seed_id,
            iterations: r.iterations,
            converged: r.converged,
            functional_trace: r.per_iteration_functional.iter().map(|&x| Real(x)).collect(),
            distances: r.final_matchings.iter().map(|m| Real(m.cost)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub index: usize,
    pub point: PointRecord,
    pub persistence: Real,
    pub nw_quadrant: bool,
    pub labeled_plans: usize,
    pub label_rate: f64,
    /// Labelled in fewer than 20% of plans.
    pub unstable: bool,
}

/// One point of a feature's point plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub plan: usize,
    pub point: PointRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub plan: usize,
    pub reason: String,
}

/// Fréchet mean, features and their per-plan labels for one ensemble and election.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub election: String,
    pub plans: usize,
    pub skipped: Vec<SkipRecord>,
    pub frechet: FrechetRecord,
    pub features: Vec<FeatureRecord>,
    /// `feature_points[f]`: the labelled point of feature `f` in each plan; plan
    /// indices refer to the input ensemble.
    pub feature_points: Vec<Vec<LabelRecord>>,
}

impl AnalysisRecord {
    pub fn new(election: &str, a: &EnsembleAnalysis) -> Self {
        let features = a
            .features
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let rate = a.marked.label_rate(i);
                FeatureRecord {
                    index: i,
                    point: p.into(),
                    persistence: Real(p.persistence()),
                    nw_quadrant: p.in_nw_quadrant(),
                    labeled_plans: a.marked.labeled_count(i),
                    label_rate: rate,
                    unstable: rate < UNSTABLE_LABEL_RATE,
                }
            })
            .collect();
        let feature_points = (0..a.features.len())
            .map(|f| {
                a.marked
                    .feature_points(f)
                    .into_iter()
                    .map(|(plan, l)| LabelRecord {
                        plan: a.kept[plan],
                        point: PointRecord {
                            birth: l.birth,
                            death: Real(l.death.value()),
                            anchor: l.anchor,
                        },
                    })
                    .collect()
            })
            .collect();
        Self {
            election: election.to_string(),
            plans: a.kept.len() + a.skipped.len(),
            skipped: a
                .skipped
                .iter()
                .map(|(plan, reason)| SkipRecord {
                    plan: *plan,
                    reason: reason.clone(),
                })
                .collect(),
            frechet: (&a.frechet).into(),
            features,
            feature_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneRecord {
    pub feature: usize,
    pub nw_plans: usize,
    pub nw_fraction: f64,
    pub mean_cluster_size: Option<f64>,
    pub cluster_sizes: Vec<usize>,
}

pub fn zone_records(z: &ZoneReport) -> Vec<ZoneRecord> {
    z.features
        .iter()
        .map(|f| ZoneRecord {
            feature: f.feature,
            nw_plans: f.nw_plans,
            nw_fraction: f.nw_fraction,
            mean_cluster_size: f.mean_cluster_size,
            cluster_sizes: f.cluster_sizes.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: usize,
    /// `null` when paired with the diagonal.
    pub b: Option<usize>,
    pub from: PointRecord,
    pub to: Option<PointRecord>,
    pub delta_birth: Option<f64>,
    pub delta_death: Option<f64>,
}

impl From<&FeaturePair> for PairRecord {
    fn from(p: &FeaturePair) -> Self {
        Self {
            a: p.a,
            b: p.b,
            from: (&p.from).into(),
            to: p.to.as_ref().map(PointRecord::from),
            delta_birth: p.delta_birth,
            delta_death: p.delta_death,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub mode: MatchingMode,
    pub swing_reference: (f64, f64),
    pub pairs: Vec<PairRecord>,
    pub unpaired_b: Vec<usize>,
}

impl From<&ElectionComparison> for ComparisonRecord {
    fn from(c: &ElectionComparison) -> Self {
        Self {
            mode: c.mode,
            swing_reference: c.swing_reference,
            pairs: c.pairs.iter().map(PairRecord::from).collect(),
            unpaired_b: c.unpaired_b.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatRecord {
    pub threshold: f64,
    pub mean_democratic: f64,
    pub mean_republican: f64,
    pub democratic_histogram: BTreeMap<usize, usize>,
    pub republican_histogram: BTreeMap<usize, usize>,
}

impl From<&SeatSummary> for SeatRecord {
    fn from(s: &SeatSummary) -> Self {
        Self {
            threshold: s.threshold,
            mean_democratic: s.mean(Party::Democratic),
            mean_republican: s.mean(Party::Republican),
            democratic_histogram: s.histogram(Party::Democratic),
            republican_histogram: s.histogram(Party::Republican),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRecord {
    pub dem_favoring: AnalysisRecord,
    pub rep_favoring: AnalysisRecord,
    pub dem_favoring_seats: SeatRecord,
    pub rep_favoring_seats: SeatRecord,
    pub optimal_l2: ComparisonRecord,
    pub geographic: ComparisonRecord,
    /// Per feature of the Democratic-favoring mean: both pairings agree.
    pub agreement: Vec<bool>,
}

impl BiasRecord {
    pub fn new(election: &str, r: &BiasReport) -> Self {
        Self {
            dem_favoring: AnalysisRecord::new(election, &r.dem),
            rep_favoring: AnalysisRecord::new(election, &r.rep),
            dem_favoring_seats: (&r.dem_seats).into(),
            rep_favoring_seats: (&r.rep_seats).into(),
            optimal_l2: (&r.optimal_l2).into(),
            geographic: (&r.geographic).into(),
            agreement: r.agreement.clone(),
        }
    }
}
