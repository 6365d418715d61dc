//! File formats: graph JSON, plan/diagram/matrix/heat-map/trace CSVs, ensemble
//! directories, JSON reports, SVG diagram plots and experiment configs.
//!
//! Floats are written with Rust's shortest round-trip formatting and infinite
//! values as `inf`, so every artifact parses back to the value it came from.

mod config;
mod ensemble;
pub mod report;
mod svg;
mod tables;

pub use config::{AnalysisSettings, ExperimentConfig};
pub use ensemble::{plan_file_name, read_ensemble, write_ensemble, EnsembleManifest, MANIFEST_FILE};
pub use svg::{diagram_series, scatter_svg, Series, INFINITY_DRAWN_AT};
pub use tables::{
    diagram_from_csv, diagram_to_csv, heat_map_to_csv, matrix_from_csv, matrix_to_csv, overlay_to_csv, plan_from_csv,
    plan_to_csv, read_diagram, read_matrix, read_plan, trace_to_csv, write_diagram, write_heat_map, write_matrix,
    write_overlay, write_plan, write_trace,
};

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{DualGraph, GraphError, PlanError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

impl IoError {
    pub(crate) fn format(path: &Path, message: impl ToString) -> Self {
        IoError::Format {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `contents`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<(), IoError> {
    let wrap = |source| IoError::File {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(wrap)?;
    }
    fs::write(path, contents).map_err(wrap)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| IoError::format(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| IoError::format(path, e))
}

pub fn read_graph(path: &Path) -> Result<DualGraph, IoError> {
    let text = read_text(path)?;
    DualGraph::from_json_str(&text).map_err(|e| match e {
        GraphError::Parse(m) => IoError::format(path, m),
        other => IoError::Graph(other),
    })
}

pub fn write_graph(path: &Path, g: &DualGraph) -> Result<(), IoError> {
    write_json(path, &g.to_document())
}
