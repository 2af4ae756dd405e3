use serde::{Deserialize, Serialize};

use super::geodesics::canonical_geodesic;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, UNREACHABLE};
use crate::rng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    /// Children are sought at distance in `[r, alpha_target·r]` from their parent.
    pub alpha_target: f64,
    /// Above this many tree-vertex pairs, distortion is measured on a sample.
    pub pair_budget: usize,
    pub rng_seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            alpha_target: 2.0,
            pair_budget: 100_000,
            rng_seed: 0,
        }
    }
}

/// A complete binary tree mapped into a graph.
///
/// Tree vertices use heap numbering: the root is 1 and the children of `i`
/// are `2i` and `2i + 1`, so generation `k` holds ids `2^k .. 2^(k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedTree {
    pub r: usize,
    pub depth: usize,
    /// `image[i - 1]` is the graph vertex of tree vertex `i`.
    pub image: Vec<VertexId>,
    /// `paths[i - 2]` is a geodesic from the parent's image to the image of `i`.
    pub paths: Vec<Vec<VertexId>>,
    /// Largest `max(d_G / (r·d_T), r·d_T / d_G)` over the measured pairs.
    pub alpha: f64,
    pub alpha_exact: bool,
    /// Largest Hausdorff distance between a concatenated root-to-leaf edge
    /// path and a geodesic with the same endpoints.
    pub kappa: usize,
}

impl EmbeddedTree {
    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn root(&self) -> usize {
        1
    }

    pub fn image(&self, t: usize) -> VertexId {
        self.image[t - 1]
    }

    pub fn generation(t: usize) -> usize {
        (usize::BITS - 1 - t.leading_zeros()) as usize
    }

    pub fn parent(t: usize) -> Option<usize> {
        (t > 1).then_some(t / 2)
    }

    pub fn children(t: usize) -> [usize; 2] {
        [2 * t, 2 * t + 1]
    }

    /// Ancestor of `t` at generation `gen` (or `t` itself when already there).
    pub fn ancestor(t: usize, gen: usize) -> usize {
        let g = Self::generation(t);
        if gen >= g {
            t
        } else {
            t >> (g - gen)
        }
    }

    pub fn is_ancestor(a: usize, t: usize) -> bool {
        Self::ancestor(t, Self::generation(a)) == a && Self::generation(a) <= Self::generation(t)
    }

    pub fn tree_distance(a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a, b);
        let mut d = 0;
        while x != y {
            if x > y {
                x /= 2;
            } else {
                y /= 2;
            }
            d += 1;
        }
        d
    }

    /// Tree vertices of generation `gen`.
    pub fn generation_range(gen: usize) -> std::ops::Range<usize> {
        (1usize << gen)..(1usize << (gen + 1))
    }

    /// Concatenated graph path from the image of `a` down to the image of
    /// its descendant `b`.
    pub fn descending_path(&self, a: usize, b: usize) -> Vec<VertexId> {
        let mut chain = Vec::new();
        let mut t = b;
        while t != a {
            chain.push(t);
            t /= 2;
        }
        let mut out = vec![self.image(a)];
        for &c in chain.iter().rev() {
            out.extend_from_slice(&self.paths[c - 2][1..]);
        }
        out
    }
}

/// Greedy bilipschitz embedding of a depth-`depth` binary tree at scale `r`.
///
/// Each leaf's children are the admissible pair of maximal separation on the
/// smallest sphere around it that has one; admissible vertices are unused,
/// move away from the origin by at least `r / alpha_target`, and the pair is
/// at least `r` apart. Ties go to the lowest ids.
pub fn embed_binary_tree(
    g: &Graph,
    r: usize,
    depth: usize,
    cfg: &EmbedConfig,
) -> Result<EmbeddedTree> {
    if r < 2 {
        return Err(Error::Parameter(format!(
            "scale r = {r} must be at least 2"
        )));
    }
    if !(cfg.alpha_target >= 1.0) {
        return Err(Error::Parameter("alpha_target must be at least 1".into()));
    }
    let o = g.origin();
    let rho_max = (cfg.alpha_target * r as f64).floor() as usize;
    let step = (r as f64 / cfg.alpha_target).ceil() as usize;
    let mut used = vec![false; g.vertex_count()];
    used[o] = true;
    let mut image = vec![o];
    let mut paths = Vec::new();
    for t in 1..(1usize << depth) {
        let u = image[t - 1];
        let du = g.depth(u).unwrap_or(usize::MAX);
        let dist = g.bfs_raw(&[u], None, rho_max as u32);
        if (0..g.vertex_count())
            .any(|v| g.is_frontier(v) && dist[v] != UNREACHABLE && (dist[v] as usize) < rho_max)
        {
            return Err(Error::Embedding {
                tree_vertex: t,
                generation: EmbeddedTree::generation(t),
                graph_vertex: u,
                reason: "candidate spheres reach the truncation frontier".into(),
            });
        }
        let mut chosen = None;
        for rho in r..=rho_max {
            let cands: Vec<VertexId> = (0..g.vertex_count())
                .filter(|&v| {
                    dist[v] as usize == rho
                        && !used[v]
                        && g.depth(v).is_some_and(|d| d >= du + step)
                })
                .collect();
            let mut best: Option<(usize, VertexId, VertexId)> = None;
            for (i, &w) in cands.iter().enumerate() {
                let dw = g.bfs_raw(&[w], None, u32::MAX);
                for &z in &cands[i + 1..] {
                    let d = dw[z] as usize;
                    if d >= r && best.is_none_or(|(bd, _, _)| d > bd) {
                        best = Some((d, w, z));
                    }
                }
            }
            if let Some((_, w, z)) = best {
                chosen = Some((w, z));
                break;
            }
        }
        let Some((w, z)) = chosen else {
            return Err(Error::Embedding {
                tree_vertex: t,
                generation: EmbeddedTree::generation(t),
                graph_vertex: u,
                reason: "no admissible pair of children".into(),
            });
        };
        for c in [w, z] {
            used[c] = true;
            image.push(c);
            paths.push(canonical_geodesic(g, u, c)?);
        }
    }
    let (alpha, alpha_exact) = measure_alpha(g, &image, r, cfg);
    let mut tree = EmbeddedTree {
        r,
        depth,
        image,
        paths,
        alpha,
        alpha_exact,
        kappa: 0,
    };
    tree.kappa = measure_kappa(g, &tree)?;
    Ok(tree)
}

fn measure_alpha(g: &Graph, image: &[VertexId], r: usize, cfg: &EmbedConfig) -> (f64, bool) {
    let n = image.len();
    let pairs = n * (n - 1) / 2;
    let distortion = |a: usize, b: usize, dg: u32| -> f64 {
        let dt = (r * EmbeddedTree::tree_distance(a, b)) as f64;
        let dg = dg as f64;
        (dg / dt).max(dt / dg)
    };
    let mut alpha: f64 = 1.0;
    if pairs <= cfg.pair_budget {
        for a in 1..=n {
            let d = g.bfs_raw(&[image[a - 1]], None, u32::MAX);
            for b in a + 1..=n {
                alpha = alpha.max(distortion(a, b, d[image[b - 1]]));
            }
        }
        (alpha, true)
    } else {
        let mut rng = rng::sampler(cfg.rng_seed);
        let sources = (cfg.pair_budget / n).max(1);
        for _ in 0..sources {
            let a = rng.random_range(1..=n);
            let d = g.bfs_raw(&[image[a - 1]], None, u32::MAX);
            for b in 1..=n {
                if b != a {
                    alpha = alpha.max(distortion(a, b, d[image[b - 1]]));
                }
            }
        }
        (alpha, false)
    }
}

fn measure_kappa(g: &Graph, tree: &EmbeddedTree) -> Result<usize> {
    let mut kappa = 0;
    if tree.depth == 0 {
        return Ok(0);
    }
    for leaf in EmbeddedTree::generation_range(tree.depth) {
        let walk = tree.descending_path(1, leaf);
        let geo = canonical_geodesic(g, tree.image(1), tree.image(leaf))?;
        let to_geo = g.bfs_raw(&geo, None, u32::MAX);
        let to_walk = g.bfs_raw(&walk, None, u32::MAX);
        let a = walk.iter().map(|&v| to_geo[v]).max().unwrap_or(0);
        let b = geo.iter().map(|&v| to_walk[v]).max().unwrap_or(0);
        kappa = kappa.max(a.max(b) as usize);
    }
    Ok(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_lattice, three_regular_tree};

    #[test]
    fn tree_embeds_isometrically() {
        let g = three_regular_tree(8).unwrap();
        let t = embed_binary_tree(&g, 2, 3, &EmbedConfig::default()).unwrap();
        assert_eq!(t.size(), 15);
        assert_eq!(t.alpha, 1.0);
        assert_eq!(t.kappa, 0);
        for v in 1..=15 {
            assert_eq!(g.depth(t.image(v)), Some(2 * EmbeddedTree::generation(v)));
        }
    }

    #[test]
    fn line_fails_at_first_generation() {
        let g = generate_lattice(1, 40).unwrap();
        match embed_binary_tree(&g, 2, 3, &EmbedConfig::default()) {
            Err(Error::Embedding { generation, .. }) => assert_eq!(generation, 1),
            other => panic!("expected embedding failure, got {other:?}"),
        }
    }

    #[test]
    fn heap_arithmetic() {
        assert_eq!(EmbeddedTree::generation(1), 0);
        assert_eq!(EmbeddedTree::generation(7), 2);
        assert_eq!(EmbeddedTree::ancestor(13, 1), 3);
        assert_eq!(EmbeddedTree::tree_distance(4, 7), 4);
        assert!(EmbeddedTree::is_ancestor(3, 13));
        assert!(!EmbeddedTree::is_ancestor(2, 13));
    }
}
