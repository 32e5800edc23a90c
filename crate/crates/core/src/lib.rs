//! Intrinsic dimension estimation for point clouds sampled near manifolds.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: seeded random streams, symmetric eigensolvers, Bessel
//!   functions, von Mises fitting, quadrature and small statistics helpers.
//! - [`geometry`]: the benchmark manifold catalog, chart maps, samplers and
//!   random orthogonal embeddings.
//! - [`neighbors`]: exact k-nearest-neighbour tables.
//! - [`transport`]: exact 1-Wasserstein distance between equal-size clouds.
//! - [`estimators`]: the eight dimension estimators.
//! - [`tuning`]: stable-window hyperparameter selection.
//! - [`bench`]: replicated factor sweeps and the 18-manifold suite.
//! - [`dataset`]: CSV ingestion and output for point clouds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod neighbors;
pub mod numerics;
pub mod transport;
pub mod tuning;

pub use error::{Error, Result};
pub use estimators::{estimate, EstimateReport, EstimatorConfig, Method};
pub use geometry::{ManifoldKind, ManifoldSpec, PointCloud, SampleConfig};
pub use numerics::RngStream;
