use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet, UNREACHABLE};
use crate::rng;

pub const DEFAULT_GEODESIC_CAP: usize = 10_000;

/// All geodesics between two vertices, as a shortest-path DAG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSet {
    pub x: VertexId,
    pub y: VertexId,
    pub length: usize,
    /// Union of the vertices of all geodesics.
    pub dag_vertices: Vec<VertexId>,
    /// Materialized geodesics, lexicographically smallest first.
    pub paths: Vec<Vec<VertexId>>,
    /// Exact number of geodesics when `exact`, otherwise a lower bound.
    pub count: u128,
    pub exact: bool,
    pub frontier_touched: bool,
}

fn dist_from(g: &Graph, v: VertexId) -> Vec<u32> {
    g.bfs_raw(&[v], None, u32::MAX)
}

/// Lowest-id geodesic from `x` to `y`.
pub fn canonical_geodesic(g: &Graph, x: VertexId, y: VertexId) -> Result<Vec<VertexId>> {
    let dy = dist_from(g, y);
    walk_down(g, x, &dy).ok_or(Error::NoPath(x, y))
}

fn walk_down(g: &Graph, x: VertexId, dy: &[u32]) -> Option<Vec<VertexId>> {
    if dy[x] == UNREACHABLE {
        return None;
    }
    let mut path = vec![x];
    let mut u = x;
    while dy[u] > 0 {
        u = *g.neighbors(u).iter().find(|&&v| dy[v] + 1 == dy[u])?;
        path.push(u);
    }
    Some(path)
}

pub fn enumerate_geodesics(g: &Graph, x: VertexId, y: VertexId, cap: usize) -> Result<GeodesicSet> {
    let dx = dist_from(g, x);
    let dy = dist_from(g, y);
    if dx[y] == UNREACHABLE {
        return Err(Error::NoPath(x, y));
    }
    let len = dx[y];
    let on_dag = |v: VertexId| dx[v] != UNREACHABLE && dy[v] != UNREACHABLE && dx[v] + dy[v] == len;
    let dag_vertices: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| on_dag(v)).collect();
    let frontier_touched = dag_vertices.iter().any(|&v| g.is_frontier(v));

    // number of geodesics from each DAG vertex to y, by increasing dy
    let mut ways = vec![0u128; g.vertex_count()];
    let mut by_level = dag_vertices.clone();
    by_level.sort_by_key(|&v| dy[v]);
    for &v in &by_level {
        ways[v] = if v == y {
            1
        } else {
            g.neighbors(v)
                .iter()
                .filter(|&&u| on_dag(u) && dy[u] + 1 == dy[v])
                .fold(0u128, |acc, &u| acc.saturating_add(ways[u]))
        };
    }
    let count = ways[x];
    let exact = count <= cap as u128 && count != u128::MAX;

    let mut paths = Vec::new();
    let mut stack = vec![x];
    collect(g, &dy, &on_dag, &mut stack, &mut paths, cap);
    Ok(GeodesicSet {
        x,
        y,
        length: len as usize,
        dag_vertices,
        paths,
        count,
        exact,
        frontier_touched,
    })
}

fn collect(
    g: &Graph,
    dy: &[u32],
    on_dag: &dyn Fn(VertexId) -> bool,
    stack: &mut Vec<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
    cap: usize,
) {
    if out.len() >= cap {
        return;
    }
    let u = *stack.last().expect("non-empty");
    if dy[u] == 0 {
        out.push(stack.clone());
        return;
    }
    for &v in g.neighbors(u) {
        if on_dag(v) && dy[v] + 1 == dy[u] {
            stack.push(v);
            collect(g, dy, on_dag, stack, out, cap);
            stack.pop();
            if out.len() >= cap {
                return;
            }
        }
    }
}

/// Result of sampling geodesic triangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    /// Largest observed distance from a point of one side to the other two.
    pub delta: f64,
    pub witness: Option<(VertexId, VertexId, VertexId)>,
    pub triangles: usize,
}

/// Lower bound on the thin-triangle constant from sampled triangles, using the
/// canonical geodesic for each side.
///
/// When the number of vertex triples does not exceed `samples`, every
/// unordered triple is examined.
pub fn delta_thin_estimate(g: &Graph, samples: usize, rng_seed: u64) -> Result<DeltaEstimate> {
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let n = g.vertex_count();
    let total = (n as u128) * (n as u128 - 1).max(1) * (n as u128 - 2).max(1) / 6;
    let triples: Vec<(VertexId, VertexId, VertexId)> = if total <= samples as u128 {
        let mut all = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    all.push((a, b, c));
                }
            }
        }
        all
    } else {
        let mut rng = rng::sampler(rng_seed);
        (0..samples)
            .map(|_| {
                (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                )
            })
            .collect()
    };
    let mut best = DeltaEstimate {
        delta: 0.0,
        witness: None,
        triangles: 0,
    };
    for (a, b, c) in triples {
        let Some(defect) = triangle_defect(g, a, b, c) else {
            continue;
        };
        best.triangles += 1;
        if best.witness.is_none() || defect as f64 > best.delta {
            best.delta = defect as f64;
            best.witness = Some((a, b, c));
        }
    }
    Ok(best)
}

fn triangle_defect(g: &Graph, a: VertexId, b: VertexId, c: VertexId) -> Option<u32> {
    let (da, db, dc) = (dist_from(g, a), dist_from(g, b), dist_from(g, c));
    let sides = [
        walk_down(g, a, &db)?,
        walk_down(g, b, &dc)?,
        walk_down(g, c, &da)?,
    ];
    let mut worst = 0;
    for i in 0..3 {
        let others: Vec<VertexId> = sides
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, s)| s.iter().copied())
            .collect();
        let d = g.bfs_raw(&others, None, u32::MAX);
        worst = worst.max(sides[i].iter().map(|&u| d[u]).max().unwrap_or(0));
    }
    Some(worst)
}

/// Union of radius-`width` balls around all geodesics between two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub x: VertexId,
    pub y: VertexId,
    pub width: usize,
    pub members: VertexSet,
    pub frontier_touched: bool,
}

pub fn build_cylinder(g: &Graph, x: VertexId, y: VertexId, width: usize) -> Result<Cylinder> {
    let dx = dist_from(g, x);
    let dy = dist_from(g, y);
    if dx[y] == UNREACHABLE {
        return Err(Error::NoPath(x, y));
    }
    let dag: Vec<VertexId> = (0..g.vertex_count())
        .filter(|&v| dx[v] != UNREACHABLE && dy[v] != UNREACHABLE && dx[v] + dy[v] == dx[y])
        .collect();
    let members = g.ball_around(&dag, width, None);
    let frontier_touched = members.iter().any(|v| g.is_frontier(v));
    Ok(Cylinder {
        x,
        y,
        width,
        members,
        frontier_touched,
    })
}

/// Hop length of the shortest `a → b` path avoiding `forbidden`; `None` if
/// there is none.
pub fn detour_length(
    g: &Graph,
    a: VertexId,
    b: VertexId,
    forbidden: &VertexSet,
) -> Result<Option<usize>> {
    if forbidden.contains(a) || forbidden.contains(b) {
        return Err(Error::Argument(
            "detour endpoints must not be forbidden".into(),
        ));
    }
    let d = g.bfs_raw(&[a], Some(forbidden), u32::MAX)[b];
    Ok((d != UNREACHABLE).then_some(d as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_lattice, three_regular_tree, Family};

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(
            n,
            &edges,
            0,
            Family::Custom {
                name: "cycle".into(),
            },
        )
        .unwrap()
    }

    fn lattice_id(g: &Graph, x: f64, y: f64) -> VertexId {
        g.layout()
            .unwrap()
            .iter()
            .position(|p| p[0] == x && p[1] == y)
            .unwrap()
    }

    #[test]
    fn tree_has_unique_geodesic() {
        let g = three_regular_tree(5).unwrap();
        let s = enumerate_geodesics(&g, 30, 70, 100).unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.paths.len(), 1);
    }

    #[test]
    fn lattice_geodesic_count() {
        let g = generate_lattice(2, 4).unwrap();
        let (a, b) = (lattice_id(&g, 0.0, 0.0), lattice_id(&g, 2.0, 1.0));
        let s = enumerate_geodesics(&g, a, b, 100).unwrap();
        assert_eq!((s.count, s.paths.len(), s.length), (3, 3, 3));
        assert!(s.exact);
        let capped = enumerate_geodesics(&g, a, b, 2).unwrap();
        assert_eq!(capped.paths.len(), 2);
        assert!(!capped.exact);
    }

    #[test]
    fn cycle_antipodes() {
        let g = cycle(6);
        let s = enumerate_geodesics(&g, 0, 3, 10).unwrap();
        assert_eq!((s.count, s.length), (2, 3));
    }

    #[test]
    fn delta_is_zero_on_trees() {
        let g = three_regular_tree(5).unwrap();
        for samples in [1, 10, 200] {
            assert_eq!(delta_thin_estimate(&g, samples, 3).unwrap().delta, 0.0);
        }
    }

    #[test]
    fn delta_positive_on_cycle() {
        let g = cycle(8);
        assert!(delta_thin_estimate(&g, 1000, 0).unwrap().delta >= 1.0);
    }

    #[test]
    fn degenerate_cylinders() {
        let g = three_regular_tree(5).unwrap();
        let c = build_cylinder(&g, 30, 70, 0).unwrap();
        let path = canonical_geodesic(&g, 30, 70).unwrap();
        assert_eq!(c.members, VertexSet::from_iter_in(g.vertex_count(), path));
        let c = build_cylinder(&g, 4, 4, 3).unwrap();
        assert_eq!(c.members, g.ball(4, 3));
    }

    #[test]
    fn detour_examples() {
        let g = cycle(12);
        let forbidden = VertexSet::from_iter_in(12, [3]);
        assert_eq!(detour_length(&g, 0, 6, &forbidden).unwrap(), Some(6));
        assert_eq!(
            detour_length(&g, 0, 6, &VertexSet::empty(12)).unwrap(),
            Some(6)
        );
        assert!(detour_length(&g, 3, 6, &forbidden).is_err());
        let t = three_regular_tree(5).unwrap();
        let path = canonical_geodesic(&t, 46, 93).unwrap();
        assert_eq!(path.len(), 11);
        let ball = t.ball(path[5], 1);
        assert_eq!(detour_length(&t, 46, 93, &ball).unwrap(), None);
    }
}
