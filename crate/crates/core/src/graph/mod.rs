//! Graph representation, metric utilities and isoperimetry.
//!
//! Infinite graphs are realized as finite balls around an origin. Vertices
//! whose truncated degree is smaller than their degree in the infinite graph
//! carry a frontier flag; anything that reaches them may be measuring the
//! truncation rather than the graph.

mod generators;
mod io;

pub use generators::{
    generate_free_product, generate_lattice, generate_regular_tree, generate_tessellation,
    tessellation_edge_length, three_regular_tree, MAX_VERTICES,
};
pub use io::GraphDoc;

use std::collections::VecDeque;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub type VertexId = usize;

/// Marker for unreachable vertices in a [`DistanceMap`].
pub const UNREACHABLE: u32 = u32::MAX;

/// Generator provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    RegularTree { branching: usize, depth: usize },
    Tessellation { p: usize, q: usize, layers: usize },
    Lattice { dim: usize, radius: usize },
    FreeProduct { factors: Vec<usize>, radius: usize },
    Custom { name: String },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::RegularTree { .. } => "tree",
            Family::Tessellation { .. } => "tess",
            Family::Lattice { .. } => "lattice",
            Family::FreeProduct { .. } => "free",
            Family::Custom { .. } => "custom",
        }
    }
}

/// Immutable undirected simple graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    family: Family,
    layout: Option<Vec<[f64; 2]>>,
    origin: VertexId,
    frontier: Vec<bool>,
    depth: Vec<u32>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    ///
    /// Rejects out-of-range ids, self-loops and duplicate edges.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
        origin: VertexId,
        family: Family,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Argument("graph needs at least one vertex".into()));
        }
        if origin >= vertex_count {
            return Err(Error::Argument(format!("origin {origin} out of range")));
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Argument(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::Argument(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Argument(format!("duplicate edge at vertex {u}")));
            }
        }
        Ok(Self::from_sorted_adjacency(
            adj,
            origin,
            family,
            vec![false; vertex_count],
        ))
    }

    pub(crate) fn from_sorted_adjacency(
        adj: Vec<Vec<VertexId>>,
        origin: VertexId,
        family: Family,
        frontier: Vec<bool>,
    ) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        offsets.push(0);
        let mut max_degree = 0;
        for list in &adj {
            max_degree = max_degree.max(list.len());
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let mut g = Graph {
            offsets,
            targets,
            family,
            layout: None,
            origin,
            frontier,
            depth: Vec::new(),
            max_degree,
        };
        g.depth = g.bfs_raw(&[origin], None, u32::MAX);
        g
    }

    pub fn with_layout(mut self, layout: Vec<[f64; 2]>) -> Result<Self> {
        if layout.len() != self.vertex_count() {
            return Err(Error::Argument(
                "layout length differs from vertex count".into(),
            ));
        }
        self.layout = Some(layout);
        Ok(self)
    }

    pub fn with_frontier(mut self, frontier: Vec<bool>) -> Result<Self> {
        if frontier.len() != self.vertex_count() {
            return Err(Error::Argument(
                "frontier length differs from vertex count".into(),
            ));
        }
        self.frontier = frontier;
        Ok(self)
    }

    /// Same graph, re-rooted at another vertex.
    pub fn with_origin(mut self, origin: VertexId) -> Result<Self> {
        if origin >= self.vertex_count() {
            return Err(Error::Argument(format!("origin {origin} out of range")));
        }
        self.origin = origin;
        self.depth = self.bfs_raw(&[origin], None, u32::MAX);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn layout(&self) -> Option<&[[f64; 2]]> {
        self.layout.as_deref()
    }

    pub fn is_frontier(&self, v: VertexId) -> bool {
        self.frontier[v]
    }

    pub fn frontier(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).filter(move |&v| self.frontier[v])
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Hop distance from the origin.
    pub fn depth(&self, v: VertexId) -> Option<usize> {
        match self.depth[v] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn is_connected(&self) -> bool {
        self.depth.iter().all(|&d| d != UNREACHABLE)
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.vertex_count()
    }

    /// Distance from `x` to the nearest frontier vertex, if any.
    pub fn frontier_distance(&self, x: VertexId) -> Option<usize> {
        let dist = self.bfs_raw(&[x], None, u32::MAX);
        self.frontier()
            .filter_map(|v| (dist[v] != UNREACHABLE).then_some(dist[v] as usize))
            .min()
    }

    /// Largest `n` with `B(x, n)` identical to the ball of the untruncated graph.
    pub fn safe_radius(&self, x: VertexId) -> usize {
        self.frontier_distance(x).unwrap_or(usize::MAX)
    }

    /// Plain BFS honoring an optional forbidden mask and a depth cap.
    pub(crate) fn bfs_raw(
        &self,
        sources: &[VertexId],
        forbidden: Option<&VertexSet>,
        max_depth: u32,
    ) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if forbidden.is_some_and(|f| f.contains(s)) || dist[s] == 0 {
                continue;
            }
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du >= max_depth {
                continue;
            }
            for &v in self.neighbors(u) {
                if dist[v] == UNREACHABLE && !forbidden.is_some_and(|f| f.contains(v)) {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Vertices within distance `r` of `x`.
    pub fn ball(&self, x: VertexId, r: usize) -> VertexSet {
        self.ball_around(&[x], r, None)
    }

    /// Vertices within distance `r` of any source, avoiding `forbidden`.
    pub fn ball_around(
        &self,
        sources: &[VertexId],
        r: usize,
        forbidden: Option<&VertexSet>,
    ) -> VertexSet {
        let cap = u32::try_from(r).unwrap_or(u32::MAX - 1);
        let dist = self.bfs_raw(sources, forbidden, cap);
        VertexSet::from_predicate(self.vertex_count(), |v| dist[v] != UNREACHABLE)
    }

    /// `d_G(u, v)` by BFS.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let d = self.bfs_raw(&[u], None, u32::MAX)[v];
        (d != UNREACHABLE).then_some(d as usize)
    }
}

/// Dense vertex subset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet {
    mask: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            mask: vec![false; n],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        VertexSet {
            mask: vec![true; n],
            len: n,
        }
    }

    pub fn from_iter_in(n: usize, items: impl IntoIterator<Item = VertexId>) -> Self {
        let mut s = Self::empty(n);
        for v in items {
            s.insert(v);
        }
        s
    }

    pub fn from_predicate(n: usize, pred: impl Fn(VertexId) -> bool) -> Self {
        let mask: Vec<bool> = (0..n).map(pred).collect();
        let len = mask.iter().filter(|&&b| b).count();
        VertexSet { mask, len }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        if self.mask[v] {
            false
        } else {
            self.mask[v] = true;
            self.len += 1;
            true
        }
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        if self.mask[v] {
            self.mask[v] = false;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for v in other.iter() {
            self.insert(v);
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.iter().any(|v| other.contains(v))
    }
}

/// Hop distances from a source set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    sources: Vec<VertexId>,
    dist: Vec<u32>,
}

impl DistanceMap {
    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn get(&self, v: VertexId) -> Option<usize> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    pub fn raw(&self) -> &[u32] {
        &self.dist
    }

    /// Vertices at exactly distance `k`, in id order.
    pub fn sphere(&self, k: usize) -> Vec<VertexId> {
        (0..self.dist.len())
            .filter(|&v| self.dist[v] as usize == k)
            .collect()
    }

    pub fn max_finite(&self) -> Option<usize> {
        self.dist
            .iter()
            .filter(|&&d| d != UNREACHABLE)
            .max()
            .map(|&d| d as usize)
    }
}

pub fn bfs_distances(g: &Graph, sources: &VertexSet) -> Result<DistanceMap> {
    if sources.is_empty() {
        return Err(Error::Argument("bfs needs at least one source".into()));
    }
    let src = sources.to_vec();
    let dist = g.bfs_raw(&src, None, u32::MAX);
    Ok(DistanceMap { sources: src, dist })
}

/// Members of `s` with a neighbor outside `s`.
///
/// Frontier members count as boundary: in the untruncated graph they have
/// neighbors that the truncation dropped.
pub fn internal_boundary(g: &Graph, s: &VertexSet) -> VertexSet {
    VertexSet::from_predicate(g.vertex_count(), |v| {
        s.contains(v) && (g.is_frontier(v) || g.neighbors(v).iter().any(|&u| !s.contains(u)))
    })
}

/// Best isoperimetric ratio found by randomized search.
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerSearch {
    /// `|∂S| / |S|` of the witness; an upper bound on the Cheeger constant.
    pub best_ratio: Ratio<u64>,
    pub witness: VertexSet,
}

/// Randomized upper bound on `min |∂S|/|S|` over finite connected sets.
///
/// Candidates are BFS-grown sets from random roots and random target sizes,
/// refined by greedy single-vertex additions. The whole graph is always a
/// candidate when connected.
pub fn cheeger_ratio_search(g: &Graph, trials: usize, rng_seed: u64) -> CheegerSearch {
    let n = g.vertex_count();
    let mut rng = rng::sampler(rng_seed);
    let mut best: Option<(Ratio<u64>, VertexSet)> = None;
    let consider = |set: VertexSet, best: &mut Option<(Ratio<u64>, VertexSet)>| {
        let boundary = internal_boundary(g, &set).len() as u64;
        let ratio = Ratio::new(boundary, set.len() as u64);
        if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
            *best = Some((ratio, set));
        }
    };
    if g.is_connected() {
        consider(VertexSet::full(n), &mut best);
    }
    for _ in 0..trials {
        let root = rng.random_range(0..n);
        let target = rng.random_range(1..=n);
        let mut set = grow_bfs(g, root, target);
        refine_by_additions(g, &mut set, 4 * g.max_degree().max(1));
        consider(set, &mut best);
    }
    let (best_ratio, witness) = best.unwrap_or_else(|| {
        let s = VertexSet::from_iter_in(n, [g.origin()]);
        let b = internal_boundary(g, &s).len() as u64;
        (Ratio::new(b, 1), s)
    });
    CheegerSearch {
        best_ratio,
        witness,
    }
}

fn grow_bfs(g: &Graph, root: VertexId, target: usize) -> VertexSet {
    let mut set = VertexSet::empty(g.vertex_count());
    let mut queue = VecDeque::from([root]);
    set.insert(root);
    while let Some(u) = queue.pop_front() {
        if set.len() >= target {
            break;
        }
        for &v in g.neighbors(u) {
            if set.len() >= target {
                break;
            }
            if set.insert(v) {
                queue.push_back(v);
            }
        }
    }
    set
}

fn refine_by_additions(g: &Graph, set: &mut VertexSet, rounds: usize) {
    let in_boundary = |set: &VertexSet, v: VertexId| {
        g.is_frontier(v) || g.neighbors(v).iter().any(|&u| !set.contains(u))
    };
    let mut boundary = internal_boundary(g, set).len() as i64;
    for _ in 0..rounds {
        let size = set.len() as i64;
        let mut best: Option<(VertexId, i64)> = None;
        let mut candidates: Vec<VertexId> = set
            .iter()
            .flat_map(|u| g.neighbors(u).iter().copied())
            .filter(|&v| !set.contains(v))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for v in candidates {
            set.insert(v);
            let mut delta = i64::from(in_boundary(set, v));
            for &u in g.neighbors(v) {
                if set.contains(u) && u != v {
                    // u was boundary because of v unless something else keeps it there
                    let still = in_boundary(set, u);
                    set.remove(v);
                    let before = in_boundary(set, u);
                    set.insert(v);
                    delta += i64::from(still) - i64::from(before);
                }
            }
            set.remove(v);
            let new_b = boundary + delta;
            // compare new_b/(size+1) < current best ratio boundary/size
            if new_b * size < boundary * (size + 1) && best.is_none_or(|(_, b)| new_b < b) {
                best = Some((v, new_b));
            }
        }
        match best {
            Some((v, b)) => {
                set.insert(v);
                boundary = b;
            }
            None => break,
        }
    }
}

/// Ball sizes around a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    /// `|B(x, k)|` for `k = 0..=n`.
    pub sizes: Vec<usize>,
    /// Least-squares slope of `ln |B(x,k)|` against `k` over `k >= 1`.
    pub growth_rate: f64,
}

pub fn growth_profile(g: &Graph, x: VertexId, n: usize) -> Result<GrowthProfile> {
    if x >= g.vertex_count() {
        return Err(Error::Argument(format!("vertex {x} out of range")));
    }
    let dist = g.bfs_raw(&[x], None, u32::MAX);
    let frontier_min = g
        .frontier()
        .filter(|&v| dist[v] != UNREACHABLE)
        .map(|v| dist[v] as usize)
        .min();
    if let Some(f) = frontier_min {
        if n > f {
            return Err(Error::Range(format!(
                "radius {n} exceeds truncation-safe radius {f} around vertex {x}"
            )));
        }
    }
    let mut sphere = vec![0usize; n + 1];
    for &d in &dist {
        if d != UNREACHABLE && (d as usize) <= n {
            sphere[d as usize] += 1;
        }
    }
    let sizes: Vec<usize> = sphere
        .iter()
        .scan(0usize, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    let growth_rate = log_slope(&sizes);
    Ok(GrowthProfile { sizes, growth_rate })
}

fn log_slope(sizes: &[usize]) -> f64 {
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &s)| (k as f64, (s as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
