use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_text, IoError};
use crate::analysis::{AnalysisOptions, MatchingMode, DEFAULT_MIN_PERSISTENCE};
use crate::chains::{BiasConfig, ChainConfig, ChainKind};
use crate::frechet::FrechetOptions;
use crate::graph::{DualGraph, Election};

fn default_kind() -> ChainKind {
    ChainKind::Recom
}

fn default_subsample() -> usize {
    1
}

fn default_resplit() -> usize {
    100
}

fn default_proposals() -> usize {
    10_000
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Chain section of a config; epsilon and seed come from the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSettings {
    #[serde(default = "default_kind")]
    pub kind: ChainKind,
    pub steps: usize,
    #[serde(default = "default_subsample")]
    pub subsample_interval: usize,
    #[serde(default = "default_resplit")]
    pub max_resplit_attempts: usize,
    #[serde(default = "default_proposals")]
    pub max_proposals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSettings {
    pub min_persistence: f64,
    /// Stratified Fréchet seeds; `null` uses every diagram.
    pub frechet_seeds: Option<usize>,
    pub frechet_tol: f64,
    pub frechet_max_iter: usize,
    pub matching_mode: MatchingMode,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        let f = FrechetOptions::<f64>::default();
        Self {
            min_persistence: DEFAULT_MIN_PERSISTENCE,
            frechet_seeds: Some(20),
            frechet_tol: f.tol,
            frechet_max_iter: f.max_iter,
            matching_mode: MatchingMode::OptimalL2,
        }
    }
}

impl AnalysisSettings {
    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            min_persistence: self.min_persistence,
            frechet_seeds: self.frechet_seeds,
            frechet: FrechetOptions {
                max_iter: self.frechet_max_iter,
                tol: self.frechet_tol,
            },
        }
    }
}

/// JSON experiment description shared by the CLI subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: PathBuf,
    pub k: usize,
    pub epsilon: f64,
    #[serde(default)]
    pub elections: Vec<Election>,
    #[serde(default)]
    pub chain: Option<ChainSettings>,
    #[serde(default)]
    pub bias: Option<BiasConfig>,
    /// Starting plan CSV; generated by recursive spanning-tree splitting when absent.
    #[serde(default)]
    pub initial_plan: Option<PathBuf>,
    #[serde(default)]
    pub analysis: AnalysisSettings,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub rng_seed: u64,
}

impl ExperimentConfig {
    /// Parses a config; relative paths are taken relative to the config file.
    pub fn load(path: &Path) -> Result<Self, IoError> {
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&read_text(path)?).map_err(|e| IoError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.graph);
        if let Some(p) = cfg.initial_plan.as_mut() {
            resolve(p);
        }
        resolve(&mut cfg.output_dir);
        for p in std::iter::once(&cfg.graph).chain(cfg.initial_plan.as_ref()) {
            if !p.exists() {
                return Err(IoError::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(cfg)
    }

    /// Checks the settings against the loaded graph.
    pub fn validate(&self, g: &DualGraph) -> Result<(), IoError> {
        if self.k < 2 {
            return Err(IoError::Config(format!("k must be >= 2, got {}", self.k)));
        }
        if self.k > g.node_count() {
            return Err(IoError::Config(format!(
                "k = {} exceeds the {} units",
                self.k,
                g.node_count()
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(IoError::Config(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        let elections = self.elections.iter().chain(self.bias.as_ref().map(|b| &b.election));
        for e in elections {
            for attr in [&e.republican, &e.democratic] {
                if !g.has_attribute(attr) {
                    return Err(IoError::Config(format!(
                        "election {:?} refers to missing attribute {attr:?}",
                        e.name
                    )));
                }
            }
        }
        if let Some(b) = &self.bias {
            b.validate().map_err(|e| IoError::Config(e.to_string()))?;
        }
        if let Some(c) = self.chain_config() {
            c.validate().map_err(|e| IoError::Config(e.to_string()))?;
        }
        if self.analysis.min_persistence < 0.0 {
            return Err(IoError::Config("min_persistence must be >= 0".into()));
        }
        Ok(())
    }

    pub fn chain_kind(&self) -> ChainKind {
        self.chain.as_ref().map_or(ChainKind::Recom, |c| c.kind)
    }

    pub fn chain_config(&self) -> Option<ChainConfig> {
        self.chain.as_ref().map(|c| ChainConfig {
            steps: c.steps,
            subsample_interval: c.subsample_interval,
            epsilon: self.epsilon,
            rng_seed: self.rng_seed,
            max_resplit_attempts: c.max_resplit_attempts,
            max_proposals: c.max_proposals,
        })
    }

    /// Election by name, or the first one when `name` is `None`.
    pub fn election(&self, name: Option<&str>) -> Result<&Election, IoError> {
        match name {
            Some(n) => self
                .elections
                .iter()
                .find(|e| e.name == n)
                .ok_or_else(|| IoError::Config(format!("no election named {n:?}"))),
            None => self
                .elections
                .first()
                .ok_or_else(|| IoError::Config("config lists no elections".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"graph": "g.json", "k": 4, "epsilon": 0.02}"#).unwrap();
        assert_eq!(cfg.analysis, AnalysisSettings::default());
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert!(cfg.chain_config().is_none());
        let bad = serde_json::from_str::<ExperimentConfig>(r#"{"graph": "g.json", "k": 4, "epsilon": 0.02, "x": 1}"#);
        assert!(bad.is_err());
    }
}
