//! Geodesics, thin triangles, cylinders, detours, the embedded binary tree
//! and escape rays.

mod embed;
mod geodesics;
mod ray;

pub use embed::{embed_binary_tree, EmbedConfig, EmbeddedTree};
pub use geodesics::{
    build_cylinder, canonical_geodesic, delta_thin_estimate, detour_length, enumerate_geodesics,
    Cylinder, DeltaEstimate, GeodesicSet, DEFAULT_GEODESIC_CAP,
};
pub use ray::{build_escape_ray, far_point, slack, step_radius, EscapeRay, FarPoint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// δ together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub delta: f64,
    pub delta_measured: bool,
    pub geodesic_cap: usize,
    pub detour_budget: usize,
}

impl GeometryParams {
    pub fn new(delta: f64, delta_measured: bool) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::Parameter(format!(
                "delta must be non-negative, got {delta}"
            )));
        }
        Ok(GeometryParams {
            delta,
            delta_measured,
            geodesic_cap: DEFAULT_GEODESIC_CAP,
            detour_budget: usize::MAX,
        })
    }
}
