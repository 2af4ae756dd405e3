use std::collections::BTreeMap;
use std::fmt::Write as _;

use fpphe::fpp::{Trace, VertexState};
use fpphe::mdla::{MdlaState, Site};
use fpphe::{Graph, Real, VertexId};
use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

type Color = [u8; 3];

const BACKGROUND: Color = [255, 255, 255];
const LAMBDA: Color = [214, 39, 40];
const DORMANT: Color = [0, 0, 0];
const AGGREGATE: Color = [25, 25, 25];
const PARTICLE: Color = [160, 160, 160];
// epoch ramp endpoints, earliest first
const EARLY: Color = [8, 48, 107];
const LATE: Color = [171, 221, 164];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    /// Target width and height in pixels.
    pub size: u32,
    /// Number of FPP₁ epoch bands, each holding an equal share of the
    /// FPP₁-occupied vertices in occupation order.
    pub bands: usize,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            size: 800,
            bands: 10,
        }
    }
}

/// Vertex counts by drawn category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSummary {
    pub fpp1: usize,
    pub lambda: usize,
    pub dormant: usize,
    pub unreached: usize,
}

impl RenderSummary {
    /// Share of occupied vertices held by FPPλ.
    pub fn lambda_fraction(&self) -> f64 {
        self.lambda as f64 / (self.fpp1 + self.lambda).max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Paint {
    color: Color,
    class: &'static str,
    band: Option<usize>,
}

fn epoch_color(band: usize, bands: usize) -> Color {
    let t = if bands <= 1 {
        0.0
    } else {
        band as f64 / (bands - 1) as f64
    };
    let mix = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round() as u8;
    [
        mix(EARLY[0], LATE[0]),
        mix(EARLY[1], LATE[1]),
        mix(EARLY[2], LATE[2]),
    ]
}

fn trace_paint<T: Real>(
    trace: &Trace<T>,
    style: &RenderStyle,
) -> (Vec<Option<Paint>>, RenderSummary) {
    let n = trace.vertices.len();
    let bands = style.bands.max(1);
    let fpp1_order: Vec<VertexId> = trace
        .order
        .iter()
        .copied()
        .filter(|&v| trace.vertices[v].state == VertexState::Fpp1)
        .collect();
    let total = fpp1_order.len().max(1);
    let mut paint = vec![None; n];
    for (i, &v) in fpp1_order.iter().enumerate() {
        let band = i * bands / total;
        paint[v] = Some(Paint {
            color: epoch_color(band, bands),
            class: "fpp1",
            band: Some(band),
        });
    }
    let mut summary = RenderSummary {
        fpp1: fpp1_order.len(),
        ..Default::default()
    };
    for (v, rec) in trace.vertices.iter().enumerate() {
        match rec.state {
            VertexState::Lambda => {
                summary.lambda += 1;
                paint[v] = Some(Paint {
                    color: LAMBDA,
                    class: "lambda",
                    band: None,
                });
            }
            VertexState::DormantSeed => {
                summary.dormant += 1;
                paint[v] = Some(Paint {
                    color: DORMANT,
                    class: "seed",
                    band: None,
                });
            }
            VertexState::Unreached => summary.unreached += 1,
            VertexState::Fpp1 => {}
        }
    }
    (paint, summary)
}

fn mdla_paint<T: Real>(state: &MdlaState<T>) -> Vec<Option<Paint>> {
    state
        .sites
        .iter()
        .map(|s| match s {
            Site::Aggregate => Some(Paint {
                color: AGGREGATE,
                class: "aggregate",
                band: None,
            }),
            Site::Particle => Some(Paint {
                color: PARTICLE,
                class: "particle",
                band: None,
            }),
            Site::Empty => None,
        })
        .collect()
}

enum Layout<'a> {
    /// Integer coordinates, one cell per vertex.
    Grid {
        coords: Vec<(i64, i64)>,
        min: (i64, i64),
        side: (i64, i64),
    },
    /// Points in the unit disk.
    Disk(&'a [[f64; 2]]),
}

fn layout_of(g: &Graph) -> Result<Layout<'_>> {
    let pts = g.layout().ok_or_else(|| {
        CliError::Render("graph has no layout; use a lattice or tessellation".into())
    })?;
    let integral = pts
        .iter()
        .all(|p| p[0].fract() == 0.0 && p[1].fract() == 0.0);
    if !integral {
        return Ok(Layout::Disk(pts));
    }
    let coords: Vec<(i64, i64)> = pts.iter().map(|p| (p[0] as i64, p[1] as i64)).collect();
    let min = coords
        .iter()
        .fold((i64::MAX, i64::MAX), |m, c| (m.0.min(c.0), m.1.min(c.1)));
    let max = coords
        .iter()
        .fold((i64::MIN, i64::MIN), |m, c| (m.0.max(c.0), m.1.max(c.1)));
    Ok(Layout::Grid {
        coords,
        min,
        side: (max.0 - min.0 + 1, max.1 - min.1 + 1),
    })
}

fn hex(c: Color) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn class_attr(p: &Paint) -> String {
    match p.band {
        Some(b) => format!("{} e{b}", p.class),
        None => p.class.to_owned(),
    }
}

/// Disk radius of a vertex drawn at `z`, shrinking toward the boundary.
fn disk_radius(z: [f64; 2]) -> f64 {
    0.03 * (1.0 - (z[0] * z[0] + z[1] * z[1])).max(0.0) + 0.002
}

fn svg(g: &Graph, paint: &[Option<Paint>], style: &RenderStyle, title: &str) -> Result<String> {
    let layout = layout_of(g)?;
    let mut s = String::new();
    let size = style.size;
    let o = g.origin();
    match &layout {
        Layout::Grid { coords, min, side } => {
            writeln!(
                s,
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {} {}" shape-rendering="crispEdges">"#,
                side.0, side.1
            )
            .ok();
            writeln!(s, "<title>{title}</title>").ok();
            writeln!(
                s,
                r#"<rect width="{}" height="{}" fill="{}"/>"#,
                side.0,
                side.1,
                hex(BACKGROUND)
            )
            .ok();
            // horizontal runs of equal paint become one rectangle
            let mut rows: BTreeMap<i64, Vec<(i64, Paint)>> = BTreeMap::new();
            for (v, p) in paint.iter().enumerate() {
                if let Some(p) = p {
                    rows.entry(coords[v].1).or_default().push((coords[v].0, *p));
                }
            }
            for (y, mut row) in rows {
                row.sort_by_key(|e| e.0);
                let mut i = 0;
                while i < row.len() {
                    let (x0, p) = row[i];
                    let mut j = i + 1;
                    while j < row.len() && row[j].1 == p && row[j].0 == row[j - 1].0 + 1 {
                        j += 1;
                    }
                    // flip y so that up is up
                    let py = side.1 - 1 - (y - min.1);
                    writeln!(
                        s,
                        r#"<rect class="{}" x="{}" y="{py}" width="{}" height="1" fill="{}"/>"#,
                        class_attr(&p),
                        x0 - min.0,
                        j - i,
                        hex(p.color)
                    )
                    .ok();
                    i = j;
                }
            }
            let (ox, oy) = (coords[o].0 - min.0, side.1 - 1 - (coords[o].1 - min.1));
            let r = (side.0.max(side.1) as f64 / 100.0).max(1.5);
            writeln!(
                s,
                r#"<circle class="origin" cx="{}" cy="{}" r="{r}" fill="none" stroke="black" stroke-width="{}"/>"#,
                ox as f64 + 0.5,
                oy as f64 + 0.5,
                r / 3.0
            )
            .ok();
        }
        Layout::Disk(pts) => {
            writeln!(
                s,
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="-1.02 -1.02 2.04 2.04">"#
            )
            .ok();
            writeln!(s, "<title>{title}</title>").ok();
            writeln!(
                s,
                r#"<rect x="-1.02" y="-1.02" width="2.04" height="2.04" fill="{}"/>"#,
                hex(BACKGROUND)
            )
            .ok();
            writeln!(s, r##"<circle cx="0" cy="0" r="1" fill="none" stroke="#888888" stroke-width="0.003"/>"##).ok();
            for (v, p) in paint.iter().enumerate() {
                if let Some(p) = p {
                    let z = pts[v];
                    writeln!(
                        s,
                        r#"<circle class="{}" cx="{:.5}" cy="{:.5}" r="{:.5}" fill="{}"/>"#,
                        class_attr(p),
                        z[0],
                        -z[1],
                        disk_radius(z),
                        hex(p.color)
                    )
                    .ok();
                }
            }
            let z = pts[o];
            writeln!(
                s,
                r#"<circle class="origin" cx="{:.5}" cy="{:.5}" r="0.045" fill="none" stroke="black" stroke-width="0.008"/>"#,
                z[0], -z[1]
            )
            .ok();
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn png(g: &Graph, paint: &[Option<Paint>], style: &RenderStyle) -> Result<RgbImage> {
    let layout = layout_of(g)?;
    let bg = Rgb(BACKGROUND);
    Ok(match layout {
        Layout::Grid { coords, min, side } => {
            let scale = (style.size as i64 / side.0.max(side.1)).max(1) as u32;
            let (w, h) = (side.0 as u32 * scale, side.1 as u32 * scale);
            let mut img = RgbImage::from_pixel(w, h, bg);
            for (v, p) in paint.iter().enumerate() {
                if let Some(p) = p {
                    let x = (coords[v].0 - min.0) as u32 * scale;
                    let y = (side.1 - 1 - (coords[v].1 - min.1)) as u32 * scale;
                    for dy in 0..scale {
                        for dx in 0..scale {
                            img.put_pixel(x + dx, y + dy, Rgb(p.color));
                        }
                    }
                }
            }
            img
        }
        Layout::Disk(pts) => {
            let size = style.size.max(16);
            let mut img = RgbImage::from_pixel(size, size, bg);
            let half = size as f64 / 2.0;
            for (v, p) in paint.iter().enumerate() {
                if let Some(p) = p {
                    let z = pts[v];
                    let r = (disk_radius(z) * half).max(0.5);
                    let (cx, cy) = (half + z[0] * half * 0.98, half - z[1] * half * 0.98);
                    let (x0, x1) = (
                        (cx - r).floor().max(0.0) as u32,
                        ((cx + r).ceil() as u32).min(size - 1),
                    );
                    let (y0, y1) = (
                        (cy - r).floor().max(0.0) as u32,
                        ((cy + r).ceil() as u32).min(size - 1),
                    );
                    for y in y0..=y1 {
                        for x in x0..=x1 {
                            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                            if dx * dx + dy * dy <= r * r {
                                img.put_pixel(x, y, Rgb(p.color));
                            }
                        }
                    }
                }
            }
            img
        }
    })
}

fn check_len(g: &Graph, n: usize) -> Result<()> {
    if g.vertex_count() != n {
        return Err(CliError::Render(format!(
            "state has {n} vertices but the graph has {}",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// FPP₁ in epoch bands, FPPλ in red, dormant seeds in black; unreached
/// vertices are left blank and the origin is circled.
pub fn render_trace_svg<T: Real>(
    g: &Graph,
    trace: &Trace<T>,
    style: &RenderStyle,
) -> Result<(String, RenderSummary)> {
    check_len(g, trace.vertices.len())?;
    let (paint, summary) = trace_paint(trace, style);
    let title = format!(
        "FPPHE lambda={} mu={}",
        trace.lambda,
        trace.mu.map_or("-".into(), |m| m.to_string())
    );
    Ok((svg(g, &paint, style, &title)?, summary))
}

pub fn render_trace_png<T: Real>(
    g: &Graph,
    trace: &Trace<T>,
    style: &RenderStyle,
) -> Result<RgbImage> {
    check_len(g, trace.vertices.len())?;
    png(g, &trace_paint(trace, style).0, style)
}

/// Aggregate in black, free particles in grey.
pub fn render_mdla_svg<T: Real>(
    g: &Graph,
    state: &MdlaState<T>,
    style: &RenderStyle,
) -> Result<String> {
    check_len(g, state.sites.len())?;
    svg(
        g,
        &mdla_paint(state),
        style,
        &format!("MDLA rho={}", state.rho),
    )
}

pub fn render_mdla_png<T: Real>(
    g: &Graph,
    state: &MdlaState<T>,
    style: &RenderStyle,
) -> Result<RgbImage> {
    check_len(g, state.sites.len())?;
    png(g, &mdla_paint(state), style)
}
