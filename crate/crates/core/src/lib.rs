//! Topological summaries of districting-plan ensembles.
//!
//! Plans of a unit dual graph are sampled by Markov chains, each plan's district
//! graph is filtered by a party's vote share, and the resulting degree-0
//! persistence diagrams are compared, averaged and traced back to geography.
//!
//! The diagram layer (persistence, metrics, Fréchet means) is generic over the
//! scalar type; the aliases below fix it to `f64` as used by the graph layers.

pub mod analysis;
pub mod assignment;
pub mod chains;
pub mod frechet;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod persistence;
pub mod scalar;
pub mod stability;
pub mod synth;

pub use scalar::Scalar;

pub type Diagram = persistence::Diagram<f64>;
pub type PersistencePoint = persistence::PersistencePoint<f64>;
pub type Death = persistence::Death<f64>;
pub type Matching = metrics::Matching<f64>;
pub type FrechetResult = frechet::FrechetResult<f64>;
pub type FrechetOptions = frechet::FrechetOptions<f64>;

pub type Diagram32 = persistence::Diagram<f32>;
pub type Matching32 = metrics::Matching<f32>;
pub type FrechetResult32 = frechet::FrechetResult<f32>;
