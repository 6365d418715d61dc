//! Markov chains on valid districting plans.

mod bias;
mod flip;
mod recom;
mod seed;
mod tree;

pub use bias::{count_safe, metropolis_accept, metropolis_acceptance, safe_seats, BiasConfig, Party, SafeSeatScorer};
pub use flip::{flip_is_valid, flip_proposals, flip_step};
pub use recom::{adjacent_district_pairs, recom_step};
pub use seed::recursive_tree_partition;
pub use tree::{balanced_cut, random_spanning_tree};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DualGraph, GraphError, Plan, PlanError};

/// Deterministic generator used by every chain.
pub type ChainRng = ChaCha8Rng;

pub fn chain_rng(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("induced subgraph is empty or disconnected")]
    DisconnectedSubset,
    #[error("no balanced recombination found after {proposals} spanning trees")]
    StepExhausted { proposals: usize },
    #[error("no boundary flip keeps the plan valid")]
    NoValidFlip,
    #[error("could not seed a {k}-district plan within epsilon {epsilon}")]
    SeedingFailed { k: usize, epsilon: f64 },
    #[error("initial plan invalid: {0}")]
    InvalidInitial(#[from] PlanError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Recom,
    Flip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub steps: usize,
    /// Keep every `subsample_interval`-th state.
    pub subsample_interval: usize,
    pub epsilon: f64,
    pub rng_seed: u64,
    #[serde(default = "default_resplit")]
    pub max_resplit_attempts: usize,
    /// Spanning trees one recombination step may draw before giving up.
    #[serde(default = "default_proposals")]
    pub max_proposals: usize,
}

fn default_resplit() -> usize {
    100
}

fn default_proposals() -> usize {
    10_000
}

impl ChainConfig {
    pub fn new(steps: usize, subsample_interval: usize, epsilon: f64, rng_seed: u64) -> Self {
        Self {
            steps,
            subsample_interval,
            epsilon,
            rng_seed,
            max_resplit_attempts: default_resplit(),
            max_proposals: default_proposals(),
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        if self.steps < 1 {
            return Err(ChainError::InvalidConfig("steps must be >= 1".into()));
        }
        if self.subsample_interval < 1 {
            return Err(ChainError::InvalidConfig("subsample_interval must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ChainError::InvalidConfig(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.max_resplit_attempts < 1 || self.max_proposals < 1 {
            return Err(ChainError::InvalidConfig("retry budgets must be >= 1".into()));
        }
        Ok(())
    }

    pub fn retained(&self) -> usize {
        self.steps / self.subsample_interval
    }
}

/// Provenance recorded alongside an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMeta {
    pub kind: ChainKind,
    pub config: ChainConfig,
    pub k: usize,
    pub epsilon: f64,
    /// Chain steps taken (each is one proposal).
    pub steps: usize,
    /// Steps whose state differs from the previous one.
    pub changed: usize,
    /// Biased chains only: proposals accepted by the Metropolis rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<BiasConfig>,
}

/// Retained plans of one chain run, in chain order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub plans: Vec<Plan>,
    pub meta: EnsembleMeta,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

pub fn run_chain(g: &DualGraph, initial: &Plan, cfg: &ChainConfig, kind: ChainKind) -> Result<Ensemble, ChainError> {
    run_chain_observed(g, initial, cfg, kind, |_, _| {})
}

/// [`run_chain`] calling `observe(step, state)` after every step.
pub fn run_chain_observed(
    g: &DualGraph,
    initial: &Plan,
    cfg: &ChainConfig,
    kind: ChainKind,
    mut observe: impl FnMut(usize, &Plan),
) -> Result<Ensemble, ChainError> {
    cfg.validate()?;
    let mut current = initial.with_epsilon(g, cfg.epsilon)?;
    let mut rng = chain_rng(cfg.rng_seed);
    let mut plans = Vec::with_capacity(cfg.retained());
    let mut changed = 0;
    for step in 1..=cfg.steps {
        let next = match kind {
            ChainKind::Recom => recom_step(g, &current, &mut rng, cfg)?,
            ChainKind::Flip => flip_step(g, &current, &mut rng)?,
        };
        if next.assignment() != current.assignment() {
            changed += 1;
        }
        current = next;
        observe(step, &current);
        if step % cfg.subsample_interval == 0 {
            plans.push(current.clone());
        }
    }
    Ok(Ensemble {
        plans,
        meta: EnsembleMeta {
            kind,
            config: cfg.clone(),
            k: initial.k(),
            epsilon: cfg.epsilon,
            steps: cfg.steps,
            changed,
            accepted: None,
            bias: None,
        },
    })
}

pub fn biased_chain(
    g: &DualGraph,
    initial: &Plan,
    cfg: &ChainConfig,
    bias: &BiasConfig,
) -> Result<Ensemble, ChainError> {
    biased_chain_observed(g, initial, cfg, bias, |_, _| {})
}

/// ReCom with Metropolis weighting toward the favored party's safe seats.
///
/// Every proposal counts as a step; a rejected proposal repeats the current
/// state. States are retained every `subsample_interval` steps, so the first
/// `subsample_interval` steps act as burn-in.
pub fn biased_chain_observed(
    g: &DualGraph,
    initial: &Plan,
    cfg: &ChainConfig,
    bias: &BiasConfig,
    mut observe: impl FnMut(usize, &Plan),
) -> Result<Ensemble, ChainError> {
    cfg.validate()?;
    bias.validate()?;
    let scorer = SafeSeatScorer::new(g, &bias.election, bias.favored, bias.safe_threshold)?;
    let mut current = initial.with_epsilon(g, cfg.epsilon)?;
    let mut score = scorer.score(&current);
    let mut rng = chain_rng(cfg.rng_seed);
    let mut plans = Vec::with_capacity(cfg.retained());
    let (mut changed, mut accepted) = (0, 0);
    for step in 1..=cfg.steps {
        let proposal = recom_step(g, &current, &mut rng, cfg)?;
        let proposal_score = scorer.score(&proposal);
        let decrease = score as i64 - proposal_score as i64;
        if metropolis_accept(decrease, bias.beta, &mut rng) {
            accepted += 1;
            if proposal.assignment() != current.assignment() {
                changed += 1;
            }
            current = proposal;
            score = proposal_score;
        }
        observe(step, &current);
        if step % cfg.subsample_interval == 0 {
            plans.push(current.clone());
        }
    }
    Ok(Ensemble {
        plans,
        meta: EnsembleMeta {
            kind: ChainKind::Recom,
            config: cfg.clone(),
            k: initial.k(),
            epsilon: cfg.epsilon,
            steps: cfg.steps,
            changed,
            accepted: Some(accepted),
            bias: Some(bias.clone()),
        },
    })
}
