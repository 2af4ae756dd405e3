use serde::{Deserialize, Serialize};

use super::geodesics::canonical_geodesic;
use crate::error::{Error, Result};
use crate::graph::{internal_boundary, Graph, VertexId, VertexSet, UNREACHABLE};

/// Integer slack `⌈16δ⌉`.
pub fn slack(delta: f64) -> usize {
    (16.0 * delta).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarPoint {
    /// Boundary vertex of the occupied set farthest from the origin.
    pub x: VertexId,
    /// Vertex at distance `s` from `x` farthest from the origin.
    pub y: VertexId,
    pub depth_x: usize,
    pub depth_y: usize,
}

fn farthest_boundary(g: &Graph, occupied: &VertexSet) -> Result<VertexId> {
    if !occupied.contains(g.origin()) {
        return Err(Error::Argument(
            "occupied set must contain the origin".into(),
        ));
    }
    internal_boundary(g, occupied)
        .iter()
        .max_by_key(|&v| (g.depth(v).unwrap_or(0), std::cmp::Reverse(v)))
        .ok_or_else(|| Error::Argument("occupied set has no boundary".into()))
}

/// Vertex of the sphere `S(x, s)` farthest from the origin (lowest id on ties).
fn far_on_sphere(g: &Graph, x: VertexId, s: usize) -> Result<VertexId> {
    let d = g.bfs_raw(&[x], None, s as u32);
    if (0..g.vertex_count()).any(|v| g.is_frontier(v) && d[v] != UNREACHABLE && (d[v] as usize) < s)
    {
        return Err(Error::Range(format!(
            "ball of radius {s} around {x} reaches the truncation"
        )));
    }
    (0..g.vertex_count())
        .filter(|&v| d[v] as usize == s)
        .max_by_key(|&v| (g.depth(v).unwrap_or(0), std::cmp::Reverse(v)))
        .ok_or_else(|| Error::Range(format!("sphere of radius {s} around {x} is empty")))
}

pub fn far_point(g: &Graph, occupied: &VertexSet, s: usize, delta: f64) -> Result<FarPoint> {
    if s == 0 {
        return Err(Error::Argument("far point needs s >= 1".into()));
    }
    let x = farthest_boundary(g, occupied)?;
    let y = far_on_sphere(g, x, s)?;
    let (depth_x, depth_y) = (g.depth(x).unwrap_or(0), g.depth(y).unwrap_or(0));
    if depth_y + slack(delta) < depth_x + s {
        return Err(Error::Consistency(format!(
            "d(o,y) = {depth_y} < d(o,x) + s - ⌈16δ⌉ = {} with δ = {delta}",
            (depth_x + s) as i64 - slack(delta) as i64
        )));
    }
    Ok(FarPoint {
        x,
        y,
        depth_x,
        depth_y,
    })
}

/// Iterated far points moving away from an occupied set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeRay {
    pub r1: usize,
    pub delta: f64,
    /// `w^(0)`, the farthest boundary vertex of the occupied set.
    pub start: VertexId,
    /// `w^(1), w^(2), …`
    pub waypoints: Vec<VertexId>,
    /// Step radii `S_k = R1^{2k} + R1^{2k-1} + ⌈16δ⌉`.
    pub radii: Vec<usize>,
    /// Geodesic from the origin to `w^(0)` followed by geodesics between
    /// consecutive waypoints.
    pub ray: Vec<VertexId>,
    pub steps_requested: usize,
    /// Whether `Σ_{k≤2i} R1^k <= d(A, w^(i)) <= ⌈16δ⌉·i + Σ_{k≤2i} R1^k` held at each step.
    pub sandwich: Vec<bool>,
    /// Distance from the occupied set to each waypoint.
    pub distances_to_occupied: Vec<usize>,
}

impl EscapeRay {
    pub fn steps_completed(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_partial(&self) -> bool {
        self.waypoints.len() < self.steps_requested
    }

    /// `w^(k)`, with `w^(0)` the start.
    pub fn waypoint(&self, k: usize) -> VertexId {
        if k == 0 {
            self.start
        } else {
            self.waypoints[k - 1]
        }
    }
}

pub fn step_radius(r1: usize, k: usize, delta: f64) -> Option<usize> {
    let a = r1.checked_pow(2 * k as u32)?;
    let b = r1.checked_pow(2 * k as u32 - 1)?;
    a.checked_add(b)?.checked_add(slack(delta))
}

pub fn build_escape_ray(
    g: &Graph,
    occupied: &VertexSet,
    r1: usize,
    steps: usize,
    delta: f64,
) -> Result<EscapeRay> {
    if r1 < 2 {
        return Err(Error::Parameter(format!("R1 = {r1} must be at least 2")));
    }
    if !(delta >= 0.0) {
        return Err(Error::Parameter("delta must be non-negative".into()));
    }
    let start = farthest_boundary(g, occupied)?;
    let to_occupied = g.bfs_raw(&occupied.to_vec(), None, u32::MAX);
    let mut ray = canonical_geodesic(g, g.origin(), start)?;
    let mut out = EscapeRay {
        r1,
        delta,
        start,
        waypoints: Vec::new(),
        radii: Vec::new(),
        ray: Vec::new(),
        steps_requested: steps,
        sandwich: Vec::new(),
        distances_to_occupied: Vec::new(),
    };
    let mut current = start;
    let mut powers_sum = 0usize;
    for k in 1..=steps {
        let Some(s) = step_radius(r1, k, delta) else {
            break;
        };
        let next = match far_on_sphere(g, current, s) {
            Ok(v) => v,
            Err(Error::Range(_)) => break,
            Err(e) => return Err(e),
        };
        powers_sum += r1.pow(2 * k as u32 - 1) + r1.pow(2 * k as u32);
        let d = to_occupied[next] as usize;
        out.sandwich
            .push(powers_sum <= d && d <= slack(delta) * k + powers_sum);
        out.distances_to_occupied.push(d);
        let seg = canonical_geodesic(g, current, next)?;
        ray.extend_from_slice(&seg[1..]);
        out.radii.push(s);
        out.waypoints.push(next);
        current = next;
    }
    out.ray = ray;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_lattice, three_regular_tree};

    #[test]
    fn tree_far_point_is_exact() {
        let g = three_regular_tree(8).unwrap();
        let occ = VertexSet::from_iter_in(g.vertex_count(), [0]);
        let fp = far_point(&g, &occ, 4, 0.0).unwrap();
        assert_eq!(fp.depth_y, 4);
    }

    #[test]
    fn lattice_far_point() {
        let g = generate_lattice(2, 10).unwrap();
        let occ = g.ball(0, 2);
        let fp = far_point(&g, &occ, 3, 0.0).unwrap();
        assert_eq!(fp.depth_y, 5);
    }

    #[test]
    fn line_ray_hits_closed_forms() {
        let g = generate_lattice(1, 100).unwrap();
        let occ = VertexSet::from_iter_in(g.vertex_count(), [0]);
        let ray = build_escape_ray(&g, &occ, 2, 2, 0.0).unwrap();
        assert_eq!(ray.radii, vec![6, 24]);
        assert_eq!(ray.distances_to_occupied, vec![6, 30]);
        assert!(ray.sandwich.iter().all(|&b| b));
        assert_eq!(ray.ray.len(), 31);
    }

    #[test]
    fn zero_steps_and_truncation() {
        let g = three_regular_tree(8).unwrap();
        let occ = VertexSet::from_iter_in(g.vertex_count(), [0]);
        let ray = build_escape_ray(&g, &occ, 2, 0, 0.0).unwrap();
        assert_eq!(
            (ray.start, ray.ray.clone(), ray.waypoints.len()),
            (0, vec![0], 0)
        );
        let ray = build_escape_ray(&g, &occ, 2, 2, 0.0).unwrap();
        assert_eq!(ray.steps_completed(), 1);
        assert!(ray.is_partial());
        assert_eq!(g.depth(ray.waypoint(1)), Some(6));
    }
}
