use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_json, read_plan, write_json, write_plan, IoError};
use crate::chains::{Ensemble, EnsembleMeta};
use crate::graph::{DualGraph, Plan};

pub const MANIFEST_FILE: &str = "manifest.json";

/// `plan_000042.csv`.
pub fn plan_file_name(index: usize) -> String {
    format!("plan_{index:06}.csv")
}

/// Contents of `manifest.json`; plan files are listed relative to the directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub meta: EnsembleMeta,
    pub plans: Vec<String>,
}

pub fn write_ensemble(dir: &Path, g: &DualGraph, ensemble: &Ensemble) -> Result<EnsembleManifest, IoError> {
    let mut plans = Vec::with_capacity(ensemble.len());
    for (i, plan) in ensemble.plans.iter().enumerate() {
        let name = plan_file_name(i);
        write_plan(&dir.join(&name), g, plan)?;
        plans.push(name);
    }
    let manifest = EnsembleManifest {
        meta: ensemble.meta.clone(),
        plans,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Reads and re-validates every plan of an ensemble directory.
pub fn read_ensemble(dir: &Path, g: &DualGraph) -> Result<(EnsembleManifest, Vec<Plan>), IoError> {
    let manifest: EnsembleManifest = read_json(&dir.join(MANIFEST_FILE))?;
    let plans = manifest
        .plans
        .iter()
        .map(|name| read_plan(&dir.join(name), g, Some(manifest.meta.k), manifest.meta.epsilon))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((manifest, plans))
}
