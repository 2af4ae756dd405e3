use serde::{Deserialize, Serialize};

use super::engine::{Trace, VertexState};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, UNREACHABLE};
use crate::scalar::Real;

/// Bound on BFS work spent certifying one cluster's diameter.
const DIAMETER_WORK: usize = 5_000_000;

/// Finite-radius survival verdicts of one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProxies {
    pub r_survive: usize,
    pub fpp1_survives: bool,
    pub fppl_survives: bool,
    pub extinction: bool,
    pub fpp1_max_depth: usize,
    pub cluster_sizes: Vec<usize>,
    /// Certified lower bound on each cluster's `d_G` diameter, capped at `r_survive`.
    pub cluster_spans: Vec<usize>,
    /// Every cluster span was decided exactly (not only by the radial bound).
    pub spans_exact: bool,
}

impl OutcomeProxies {
    pub fn coexist(&self) -> bool {
        self.fpp1_survives && self.fppl_survives
    }
}

/// Classifies a trace. With a graph, cluster diameters are measured in
/// `d_G`; without one, the radial extent `max depth - min depth` is used.
///
/// Traces that reached the frontier are refused, except on trees: there no
/// path leaves the ball and comes back through a vertex other than the one
/// it left by, so the run inside the ball is the run on the whole tree.
pub fn classify_outcome<T: Real>(
    trace: &Trace<T>,
    r_survive: usize,
    graph: Option<&Graph>,
) -> Result<OutcomeProxies> {
    if trace.frontier_touched && !graph.is_some_and(Graph::is_tree) {
        return Err(Error::Frontier(
            "trace reached the truncation frontier; enlarge the graph or tighten the stop rule"
                .into(),
        ));
    }
    let fpp1_max_depth = trace.fpp1_max_depth();
    let fpp1_survives = fpp1_max_depth >= r_survive;
    let extinction = !fpp1_survives && !trace.fpp1_open;
    let mut members: Vec<Vec<VertexId>> = vec![Vec::new(); trace.clusters.len()];
    for (v, rec) in trace.vertices.iter().enumerate() {
        if let (VertexState::Lambda, Some(c)) = (rec.state, rec.cluster) {
            members[c].push(v);
        }
    }
    let mut spans = Vec::with_capacity(members.len());
    let mut exact = true;
    for (c, cl) in trace.clusters.iter().enumerate() {
        let radial = cl.radial_extent();
        if radial >= r_survive {
            spans.push(r_survive);
            continue;
        }
        match graph {
            Some(g) => match span_at_least(g, &members[c], r_survive) {
                Some(true) => spans.push(r_survive),
                Some(false) => spans.push(radial),
                None => {
                    exact = false;
                    spans.push(radial);
                }
            },
            None => {
                exact = false;
                spans.push(radial);
            }
        }
    }
    let fppl_survives = spans.iter().any(|&s| s >= r_survive);
    Ok(OutcomeProxies {
        r_survive,
        fpp1_survives,
        fppl_survives,
        extinction,
        fpp1_max_depth,
        cluster_sizes: trace.clusters.iter().map(|c| c.size).collect(),
        cluster_spans: spans,
        spans_exact: exact,
    })
}

/// Whether two members are at distance `>= r`; `None` when over budget.
fn span_at_least(g: &Graph, members: &[VertexId], r: usize) -> Option<bool> {
    if r == 0 {
        return Some(!members.is_empty());
    }
    let mut work = 0usize;
    let cap = u32::try_from(r - 1).unwrap_or(u32::MAX - 1);
    for &u in members {
        let dist = g.bfs_raw(&[u], None, cap);
        work += g.vertex_count();
        if members.iter().any(|&v| dist[v] == UNREACHABLE) {
            return Some(true);
        }
        if work > DIAMETER_WORK {
            return None;
        }
    }
    Some(false)
}
