use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cylinder::{check_good_cylinder, CheckBudgets, CylinderVerdict};
use super::params::ScaleParams;
use crate::error::{Error, Result};
use crate::fpp::{PassageTimes, SeedSource};
use crate::geometry::EmbeddedTree;
use crate::graph::{Graph, UNREACHABLE};
use crate::scalar::Exact;

/// A cylinder found bad: tree endpoints and scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadCylinder {
    pub x: usize,
    pub y: usize,
    pub scale: usize,
}

/// Removes, for each bad cylinder, the subtree hanging from the ancestor of
/// its upper endpoint `⌈3α²ηj⌉` generations up (clamped at the root).
/// Returns every removed tree vertex down to the embedding depth.
pub fn prune_bad_subtrees<E: Exact>(
    emb: &EmbeddedTree,
    bad: &[BadCylinder],
    params: &ScaleParams<E>,
) -> BTreeSet<usize> {
    prune_to_depth(emb.depth, bad, params)
}

pub fn prune_to_depth<E: Exact>(
    depth: usize,
    bad: &[BadCylinder],
    params: &ScaleParams<E>,
) -> BTreeSet<usize> {
    let mut roots = BTreeSet::new();
    for b in bad {
        let x = if EmbeddedTree::is_ancestor(b.y, b.x) {
            b.y
        } else {
            b.x
        };
        let i = EmbeddedTree::generation(x);
        let up = i.saturating_sub(params.prune_shift(b.scale));
        roots.insert(EmbeddedTree::ancestor(x, up));
    }
    let mut removed = BTreeSet::new();
    for &u in &roots {
        if removed.contains(&u) {
            continue;
        }
        let g0 = EmbeddedTree::generation(u);
        for gen in g0..=depth.max(g0) {
            let shift = gen - g0;
            let first = u << shift;
            removed.extend(first..first + (1usize << shift));
        }
    }
    removed
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodPathResult {
    pub depth: usize,
    pub verdicts: Vec<CylinderVerdict>,
    pub removed: BTreeSet<usize>,
    /// Root-to-depth path of tree vertices avoiding `removed`.
    pub path: Option<Vec<usize>>,
    /// Removed vertices meeting every root-to-depth path, inclusion-minimal.
    pub cutset: Option<Vec<usize>>,
    /// Sizes of the Voronoi cells `N(z)` of the path vertices, when computed.
    pub cell_sizes: Vec<usize>,
}

/// Leftmost root-to-generation-`depth` path avoiding `removed`, or the
/// minimal cutset of removed vertices blocking all such paths.
pub fn find_good_path(removed: &BTreeSet<usize>, depth: usize) -> GoodPathResult {
    let path = leftmost_path(1, depth, removed);
    let cutset = if path.is_some() {
        None
    } else {
        let mut cut = Vec::new();
        shallowest_removed(1, depth, removed, &mut cut);
        Some(cut)
    };
    GoodPathResult {
        depth,
        verdicts: Vec::new(),
        removed: removed.clone(),
        path,
        cutset,
        cell_sizes: Vec::new(),
    }
}

fn leftmost_path(t: usize, depth: usize, removed: &BTreeSet<usize>) -> Option<Vec<usize>> {
    if removed.contains(&t) {
        return None;
    }
    if EmbeddedTree::generation(t) == depth {
        return Some(vec![t]);
    }
    for c in EmbeddedTree::children(t) {
        if let Some(mut rest) = leftmost_path(c, depth, removed) {
            rest.insert(0, t);
            return Some(rest);
        }
    }
    None
}

// On a complete tree the shallowest removed vertex of each path forms an
// antichain in which every member is the only cut vertex of some path, so
// the set is already minimal.
fn shallowest_removed(t: usize, depth: usize, removed: &BTreeSet<usize>, out: &mut Vec<usize>) {
    if removed.contains(&t) {
        out.push(t);
        return;
    }
    if EmbeddedTree::generation(t) == depth {
        return;
    }
    for c in EmbeddedTree::children(t) {
        shallowest_removed(c, depth, removed, out);
    }
}

/// Checks every ancestor-descendant pair up to `max_scale` generations apart,
/// prunes the bad ones and searches for a good path to the embedding depth.
pub fn analyze_good_paths<E: Exact, S: SeedSource, P: PassageTimes<f64>>(
    g: &Graph,
    emb: &EmbeddedTree,
    seeds: &S,
    pt: &P,
    params: &ScaleParams<E>,
    budgets: &CheckBudgets,
    max_scale: usize,
) -> Result<GoodPathResult> {
    let mut verdicts = Vec::new();
    for y in 2..=emb.size() {
        let gy = EmbeddedTree::generation(y);
        for j in 1..=max_scale.min(gy) {
            let x = EmbeddedTree::ancestor(y, gy - j);
            verdicts.push(check_good_cylinder(
                g, emb, seeds, pt, x, y, params, budgets,
            )?);
        }
    }
    let bad: Vec<BadCylinder> = verdicts
        .iter()
        .filter(|v| !v.good)
        .map(|v| BadCylinder {
            x: v.x,
            y: v.y,
            scale: v.scale,
        })
        .collect();
    let removed = prune_bad_subtrees(emb, &bad, params);
    let mut res = find_good_path(&removed, emb.depth);
    res.verdicts = verdicts;
    if let Some(path) = &res.path {
        let cells = voronoi_cells(g, emb);
        res.cell_sizes = path
            .iter()
            .map(|&t| cells.iter().filter(|&&c| c == Some(t)).count())
            .collect();
    }
    Ok(res)
}

/// `C_{k-1}`, the number of minimal cutsets of the binary tree made of `k`
/// vertices; computed exactly.
pub fn count_minimal_cutsets(k: usize) -> Result<u128> {
    if k == 0 {
        return Err(Error::Argument("cutset size must be at least 1".into()));
    }
    if k > 60 {
        return Err(Error::Range(format!(
            "cutset size {k} overflows 128-bit arithmetic"
        )));
    }
    let mut c: u128 = 1;
    for n in 1..k as u128 {
        c = c * (4 * n - 2) / (n + 1);
    }
    Ok(c)
}

/// Nearest embedded tree vertex of every graph vertex, ties to the lowest
/// tree id; `None` where no image is reachable.
pub fn voronoi_cells(g: &Graph, emb: &EmbeddedTree) -> Vec<Option<usize>> {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut layer = Vec::new();
    for t in 1..=emb.size() {
        let v = emb.image(t);
        if label[v].is_none_or(|l| t < l) {
            label[v] = Some(t);
        }
        if dist[v] == UNREACHABLE {
            dist[v] = 0;
            layer.push(v);
        }
    }
    let mut d = 0;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &u in &layer {
            for &v in g.neighbors(u) {
                if dist[v] == UNREACHABLE {
                    dist[v] = d + 1;
                    next.push(v);
                }
                if dist[v] == d + 1 && label[v].is_none_or(|l| label[u].is_some_and(|lu| lu < l)) {
                    label[v] = label[u];
                }
            }
        }
        layer = next;
        d += 1;
    }
    label
}
