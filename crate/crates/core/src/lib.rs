//! Competing first-passage percolation in a hostile environment.
//!
//! A rate-1 first-passage process spreads from an origin while dormant seeds,
//! once touched, spread at rate `λ`. The crate provides graph generators,
//! hyperbolic geometry probes, the coupled simulation engine, multi-particle
//! diffusion limited aggregation, and the multi-scale analyzer that checks the
//! deterministic events behind the survival argument on concrete samples.

pub mod error;
pub mod fpp;
pub mod geometry;
pub mod graph;
pub mod mdla;
pub mod multiscale;
pub mod persist;
pub mod reference;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId, VertexSet};
pub use scalar::{Exact, Real};

pub type Trace = fpp::Trace<f64>;
pub type Trace32 = fpp::Trace<f32>;
pub type ScaleParams = multiscale::ScaleParams<f64>;
pub type ExactScaleParams = multiscale::ScaleParams<num_rational::Ratio<i64>>;
