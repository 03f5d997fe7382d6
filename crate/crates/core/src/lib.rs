//! k-means seeding with determinantal point processes.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which the experiment harness uses.

pub mod clustering;
pub mod datasets;
pub mod dpp;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod linalg;
pub mod metrics;
pub mod scalar;

pub use error::{Error, Result};

pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type GramMatrix64 = kernels::GramMatrix<f64>;
pub type DppSampler64 = dpp::DppSampler<f64>;
pub type Clustering64 = clustering::Clustering<f64>;
pub type Dataset64 = datasets::LabeledDataset<f64>;

pub type SymMatrix32 = linalg::SymMatrix<f32>;
pub type GramMatrix32 = kernels::GramMatrix<f32>;
pub type DppSampler32 = dpp::DppSampler<f32>;
