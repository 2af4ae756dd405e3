//! Recipes for the FPPHE growth pictures and the MDLA snapshots.
//!
//! The box size, stopping radius and color bands are fixed choices; only the
//! `(λ, μ)` and `ρ` values come from the published captions.

use std::fs;
use std::path::{Path, PathBuf};

use fpphe::fpp::{run_fpphe, PassageTimeField, SeedField, StopRule};
use fpphe::graph::generate_lattice;
use fpphe::mdla::{run_mdla, MdlaStop};
use fpphe::persist::save;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::render::{
    render_mdla_png, render_mdla_svg, render_trace_png, render_trace_svg, RenderStyle,
    RenderSummary,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFigureConfig {
    pub box_radius: usize,
    pub stop_radius: usize,
    pub lambda: f64,
    pub mus: Vec<f64>,
    pub pt_seed: u64,
    pub seed_seed: u64,
    pub style: RenderStyle,
}

impl Default for GrowthFigureConfig {
    fn default() -> Self {
        GrowthFigureConfig {
            box_radius: 300,
            stop_radius: 280,
            lambda: 0.7,
            mus: vec![0.027, 0.029, 0.030],
            pt_seed: 1,
            seed_seed: 2,
            style: RenderStyle::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdlaFigureConfig {
    pub box_radius: usize,
    pub rhos: Vec<f64>,
    pub aggregate_cap: usize,
    pub seed: u64,
    pub style: RenderStyle,
}

impl Default for MdlaFigureConfig {
    fn default() -> Self {
        MdlaFigureConfig {
            box_radius: 80,
            rhos: vec![0.1, 0.2, 0.3],
            aggregate_cap: 1500,
            seed: 1,
            style: RenderStyle::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOutput {
    pub name: String,
    pub svg: PathBuf,
    pub png: PathBuf,
    /// The varied parameter: μ for growth pictures, ρ for MDLA.
    pub parameter: f64,
    pub summary: RenderSummary,
    pub frontier_touched: bool,
}

fn write_pair(
    dir: &Path,
    name: &str,
    svg: &str,
    png: &image::RgbImage,
) -> Result<(PathBuf, PathBuf)> {
    let s = dir.join(format!("{name}.svg"));
    let p = dir.join(format!("{name}.png"));
    fs::write(&s, svg)?;
    png.save(&p)?;
    Ok((s, p))
}

/// FPPHE on a 2D box, one picture per μ, all from the same seeds.
pub fn growth_figures(dir: &Path, cfg: &GrowthFigureConfig) -> Result<Vec<FigureOutput>> {
    fs::create_dir_all(dir)?;
    let g = generate_lattice(2, cfg.box_radius)?;
    let pt = PassageTimeField::new(cfg.pt_seed);
    let mut out = Vec::new();
    for &mu in &cfg.mus {
        let trace = run_fpphe(
            &g,
            cfg.lambda,
            &pt,
            &SeedField::new(cfg.seed_seed, mu),
            StopRule::Radius(cfg.stop_radius),
        )?;
        let (svg, summary) = render_trace_svg(&g, &trace, &cfg.style)?;
        let name = format!("fpphe_lambda{}_mu{}", cfg.lambda, mu);
        let (svg_path, png_path) =
            write_pair(dir, &name, &svg, &render_trace_png(&g, &trace, &cfg.style)?)?;
        out.push(FigureOutput {
            name,
            svg: svg_path,
            png: png_path,
            parameter: mu,
            summary,
            frontier_touched: trace.frontier_touched,
        });
    }
    Ok(out)
}

/// MDLA snapshots, one per density.
pub fn mdla_figures(dir: &Path, cfg: &MdlaFigureConfig) -> Result<Vec<FigureOutput>> {
    fs::create_dir_all(dir)?;
    let g = generate_lattice(2, cfg.box_radius)?;
    let mut out = Vec::new();
    for &rho in &cfg.rhos {
        let state = run_mdla::<f64>(&g, rho, cfg.seed, MdlaStop::AggregateCap(cfg.aggregate_cap))?;
        let name = format!("mdla_rho{rho}");
        save(&state, dir.join(format!("{name}.json")))?;
        let svg = render_mdla_svg(&g, &state, &cfg.style)?;
        let (svg_path, png_path) =
            write_pair(dir, &name, &svg, &render_mdla_png(&g, &state, &cfg.style)?)?;
        let summary = RenderSummary {
            fpp1: state.aggregate_size(),
            ..Default::default()
        };
        out.push(FigureOutput {
            name,
            svg: svg_path,
            png: png_path,
            parameter: rho,
            summary,
            frontier_touched: state.frontier_touched,
        });
    }
    Ok(out)
}
