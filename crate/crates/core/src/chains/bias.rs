use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ChainError;
use crate::graph::{party_share, DistrictGraph, DualGraph, Election, GraphError, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Republican,
    Democratic,
}

impl Party {
    /// `(favored attribute, opposing attribute)` of an election.
    pub fn attributes<'a>(&self, election: &'a Election) -> (&'a str, &'a str) {
        match self {
            Party::Republican => (&election.republican, &election.democratic),
            Party::Democratic => (&election.democratic, &election.republican),
        }
    }
}

/// Metropolis weighting toward safe seats for one party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasConfig {
    pub election: Election,
    pub favored: Party,
    #[serde(default = "default_threshold")]
    pub safe_threshold: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_threshold() -> f64 {
    0.53
}

fn default_beta() -> f64 {
    2.0
}

impl BiasConfig {
    pub fn new(election: Election, favored: Party) -> Self {
        Self {
            election,
            favored,
            safe_threshold: default_threshold(),
            beta: default_beta(),
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        if !(self.safe_threshold > 0.5 && self.safe_threshold < 1.0) {
            return Err(ChainError::InvalidConfig(format!(
                "safe_threshold must lie in (0.5, 1), got {}",
                self.safe_threshold
            )));
        }
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(ChainError::InvalidConfig(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Districts whose favored-party two-party share is strictly above `threshold`.
pub fn safe_seats(dg: &DistrictGraph, election: &Election, party: Party, threshold: f64) -> Result<usize, GraphError> {
    let (favored, other) = party.attributes(election);
    Ok(party_share(dg, favored, other)?
        .into_iter()
        .filter(|&s| s > threshold)
        .count())
}

/// Counts shares strictly above `threshold`.
pub fn count_safe(shares: &[f64], threshold: f64) -> usize {
    shares.iter().filter(|&&s| s > threshold).count()
}

/// Safe-seat scorer over a fixed unit graph, aggregating straight from assignments.
#[derive(Debug, Clone)]
pub struct SafeSeatScorer {
    favored: Vec<f64>,
    other: Vec<f64>,
    threshold: f64,
}

impl SafeSeatScorer {
    pub fn new(g: &DualGraph, election: &Election, party: Party, threshold: f64) -> Result<Self, GraphError> {
        let (favored, other) = party.attributes(election);
        for name in [favored, other] {
            if !g.has_attribute(name) {
                return Err(GraphError::MissingAttribute(name.to_string()));
            }
        }
        Ok(Self {
            favored: g.attribute_values(favored),
            other: g.attribute_values(other),
            threshold,
        })
    }

    /// Zero-turnout districts are never safe.
    pub fn score(&self, plan: &Plan) -> usize {
        let mut f = vec![0.0; plan.k()];
        let mut o = vec![0.0; plan.k()];
        for (v, &d) in plan.assignment().iter().enumerate() {
            f[d] += self.favored[v];
            o[d] += self.other[v];
        }
        f.iter()
            .zip(&o)
            .filter(|&(&f, &o)| f + o > 0.0 && f / (f + o) > self.threshold)
            .count()
    }
}

/// Probability of accepting a proposal that lowers the safe-seat count by `decrease`:
/// 1 when nothing is lost, otherwise `exp(-β·Δs)`.
pub fn metropolis_acceptance(decrease: i64, beta: f64) -> f64 {
    if decrease <= 0 {
        1.0
    } else {
        (-beta * decrease as f64).exp()
    }
}

/// One Bernoulli draw of the Metropolis rule; no randomness is consumed when acceptance is certain.
pub fn metropolis_accept<R: Rng + ?Sized>(decrease: i64, beta: f64, rng: &mut R) -> bool {
    let p = metropolis_acceptance(decrease, beta);
    p >= 1.0 || rng.gen::<f64>() < p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_probabilities() {
        assert_eq!(metropolis_acceptance(0, 2.0), 1.0);
        assert_eq!(metropolis_acceptance(-3, 2.0), 1.0);
        assert!((metropolis_acceptance(1, 2.0) - 0.1353).abs() < 1e-4);
        assert!((metropolis_acceptance(2, 2.0) - 0.0183).abs() < 1e-4);
    }

    #[test]
    fn safe_seat_counts() {
        let election = Election::new("E", "R", "D");
        let dg = DistrictGraph::from_edges(3, vec![(0, 1), (1, 2)])
            .with_attribute("R", vec![48.0, 46.0, 40.0])
            .with_attribute("D", vec![52.0, 54.0, 60.0]);
        assert_eq!(safe_seats(&dg, &election, Party::Democratic, 0.53).unwrap(), 2);
        assert_eq!(safe_seats(&dg, &election, Party::Republican, 0.53).unwrap(), 0);
        assert_eq!(count_safe(&[0.5, 0.5, 0.5], 0.53), 0);
    }

    #[test]
    fn config_validation() {
        let election = Election::new("E", "R", "D");
        assert!(BiasConfig::new(election.clone(), Party::Democratic).validate().is_ok());
        let mut bad = BiasConfig::new(election, Party::Democratic);
        bad.safe_threshold = 0.4;
        assert!(bad.validate().is_err());
        bad.safe_threshold = 0.53;
        bad.beta = 0.0;
        assert!(bad.validate().is_err());
    }
}
