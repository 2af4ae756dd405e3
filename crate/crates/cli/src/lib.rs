//! Batch experiments on top of `fpphe`: parameter sweeps with survival
//! frequencies, SVG/PNG rendering and the figure recipes.

pub mod error;
pub mod figures;
pub mod graphref;
pub mod render;
pub mod sweep;

pub use error::{CliError, Result};
pub use graphref::{GraphRef, Host};
pub use render::{RenderStyle, RenderSummary};
pub use sweep::{sweep, CellResult, SweepResult, SweepSpec, SweepTiming};
