//! Benchmark and figure-reproduction harness over the `entrot` library:
//! cost curves, coupling contour grids, MDS embeddings of Gaussian geometry,
//! the covariance-estimation and barycenter Monte Carlo benchmarks, and the
//! Sinkhorn oracle verification run, with seeded determinism and CSV/JSON
//! emission.

pub mod config;
pub mod error;
pub mod grids;
pub mod mds;
pub mod metrics;
pub mod output;
pub mod runners;
pub mod sampling;

pub use config::{ExperimentConfig, ExperimentKind, SigmaTrue};
pub use error::{Error, Result};
