use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpp::{passage_distances, EdgeRef, PassageTimes, Trace};
use crate::geometry::EscapeRay;
use crate::graph::{Graph, VertexId, VertexSet, UNREACHABLE};
use crate::scalar::Real;

/// Balls along an escape ray with their enlargement regions.
///
/// Level `k` (1-based) lives at index `k - 1` of every per-level list.
/// `targets`, `enlargements`, `boundaries` and `separation` have one entry
/// fewer than `balls`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallChainPlan {
    pub r1: u64,
    pub c_out: f64,
    pub vertex_count: usize,
    pub levels_requested: usize,
    /// `w^(0)`.
    pub start: VertexId,
    /// `w^(1), …, w^(K)`.
    pub waypoints: Vec<VertexId>,
    /// The ray from the origin through `w^(K)`.
    pub ray: Vec<VertexId>,
    /// Index of `w^(k)` in `ray`, for `k = 0..=K`.
    pub waypoint_index: Vec<usize>,
    /// `R_1 = R1`, `R_k = R1^{2(k-1)}`.
    pub radii: Vec<u64>,
    /// `𝒯_1 = R1^6`, `𝒯_k = R1^{2k+4}`.
    pub budgets: Vec<u64>,
    pub balls: Vec<Vec<VertexId>>,
    /// `P^(k) = B^(k+1) ∪ (γ(w^(k), w^(k+1)) ∖ B^(k))`.
    pub targets: Vec<Vec<VertexId>>,
    /// `⌊c_out · Σ_{j≤k} 𝒯_j⌋`.
    pub enlargement_radii: Vec<u64>,
    /// Neighbourhood of `P^(k)` of that radius in the graph without `B^(k)`.
    pub enlargements: Vec<Vec<VertexId>>,
    /// Vertices of `EP^(k)` with a neighbour outside it in the ball-deleted graph.
    pub boundaries: Vec<Vec<VertexId>>,
    /// Distance in the ball-deleted graph from the occupied set to `EP^(k)`;
    /// `None` when they are disconnected.
    pub separation: Vec<Option<usize>>,
    /// Set when an enlargement reached the frontier and the chain was cut short.
    pub truncated: bool,
}

impl BallChainPlan {
    pub fn levels(&self) -> usize {
        self.balls.len()
    }

    pub fn separated(&self) -> bool {
        self.separation.iter().all(|d| *d != Some(0))
    }

    pub fn waypoint(&self, k: usize) -> VertexId {
        if k == 0 {
            self.start
        } else {
            self.waypoints[k - 1]
        }
    }
}

fn radius(r1: u64, k: usize) -> Option<u64> {
    if k == 1 {
        Some(r1)
    } else {
        r1.checked_pow(2 * (k as u32 - 1))
    }
}

fn budget(r1: u64, k: usize) -> Option<u64> {
    if k == 1 {
        r1.checked_pow(6)
    } else {
        r1.checked_pow(2 * k as u32 + 4)
    }
}

fn overflow(what: &str, k: usize) -> Error {
    Error::Range(format!("{what} at level {k} overflows"))
}

/// Materializes the ball chain along `ray` for `levels` levels.
pub fn plan_ball_chain(
    g: &Graph,
    ray: &EscapeRay,
    occupied: &VertexSet,
    r1: usize,
    levels: usize,
    c_out: f64,
) -> Result<BallChainPlan> {
    if r1 != ray.r1 {
        return Err(Error::Consistency(format!(
            "ray built with R1 = {}, plan asks for {r1}",
            ray.r1
        )));
    }
    if levels == 0 {
        return Err(Error::Argument(
            "ball chain needs at least one level".into(),
        ));
    }
    if ray.steps_completed() < levels {
        return Err(Error::Range(format!(
            "ray has {} waypoints, {levels} levels requested",
            ray.steps_completed()
        )));
    }
    if !(c_out > 0.0 && c_out.is_finite()) {
        return Err(Error::Parameter(format!(
            "c_out must be positive, got {c_out}"
        )));
    }
    let r1 = r1 as u64;
    let n = g.vertex_count();
    let steps: usize = ray.radii[..levels].iter().sum();
    let total: usize = ray.radii.iter().sum();
    let first = ray.ray.len() - 1 - total;
    let mut waypoint_index = vec![first];
    for k in 0..levels {
        waypoint_index.push(waypoint_index[k] + ray.radii[k]);
    }
    let mut plan = BallChainPlan {
        r1,
        c_out,
        vertex_count: n,
        levels_requested: levels,
        start: ray.start,
        waypoints: ray.waypoints[..levels].to_vec(),
        ray: ray.ray[..=first + steps].to_vec(),
        waypoint_index,
        radii: Vec::new(),
        budgets: Vec::new(),
        balls: Vec::new(),
        targets: Vec::new(),
        enlargement_radii: Vec::new(),
        enlargements: Vec::new(),
        boundaries: Vec::new(),
        separation: Vec::new(),
        truncated: false,
    };
    let mut balls = Vec::new();
    for k in 1..=levels {
        let rk = radius(r1, k).ok_or_else(|| overflow("radius", k))?;
        let tk = budget(r1, k).ok_or_else(|| overflow("budget", k))?;
        let ball = g.ball(plan.waypoint(k), rk as usize);
        if let Some(f) = ball.iter().find(|&v| g.is_frontier(v)) {
            return Err(Error::Frontier(format!(
                "ball B^({k}) contains frontier vertex {f}"
            )));
        }
        plan.radii.push(rk);
        plan.budgets.push(tk);
        plan.balls.push(ball.to_vec());
        balls.push(ball);
    }
    let occupied_list = occupied.to_vec();
    let mut budget_sum = 0u64;
    for k in 1..levels {
        budget_sum = budget_sum
            .checked_add(plan.budgets[k - 1])
            .ok_or_else(|| overflow("budget sum", k))?;
        let removed = &balls[k - 1];
        let mut target = balls[k].clone();
        for &v in &plan.ray[plan.waypoint_index[k]..=plan.waypoint_index[k + 1]] {
            if !removed.contains(v) {
                target.insert(v);
            }
        }
        let reach = (c_out * budget_sum as f64).floor() as u64;
        let sources: Vec<VertexId> = target.iter().filter(|&v| !removed.contains(v)).collect();
        let ep = g.ball_around(&sources, reach as usize, Some(removed));
        let boundary: Vec<VertexId> = ep
            .iter()
            .filter(|&v| {
                g.is_frontier(v)
                    || g.neighbors(v)
                        .iter()
                        .any(|&u| !ep.contains(u) && !removed.contains(u))
            })
            .collect();
        let occ: Vec<VertexId> = occupied_list
            .iter()
            .copied()
            .filter(|&v| !removed.contains(v))
            .collect();
        let separation = if occ.is_empty() {
            None
        } else {
            let d = g.bfs_raw(&occ, Some(removed), u32::MAX);
            ep.iter()
                .map(|v| d[v])
                .filter(|&d| d != UNREACHABLE)
                .min()
                .map(|d| d as usize)
        };
        let touches = ep.iter().any(|v| g.is_frontier(v));
        plan.targets.push(target.to_vec());
        plan.enlargement_radii.push(reach);
        plan.enlargements.push(ep.to_vec());
        plan.boundaries.push(boundary);
        plan.separation.push(separation);
        if touches {
            plan.truncated = true;
            plan.targets.pop();
            plan.enlargement_radii.pop();
            plan.enlargements.pop();
            plan.boundaries.pop();
            plan.separation.pop();
            plan.radii.truncate(k);
            plan.budgets.truncate(k);
            plan.balls.truncate(k);
            plan.waypoints.truncate(k);
            plan.waypoint_index.truncate(k + 1);
            plan.ray.truncate(plan.waypoint_index[k] + 1);
            break;
        }
    }
    Ok(plan)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEvents {
    pub k: usize,
    /// Right-hand side of the travel-time event, compared against the budget.
    pub travel_time: f64,
    pub budget: u64,
    pub f1: bool,
    /// Fastest ball-avoiding passage from the target to the enlargement
    /// boundary, when it is within `threshold`.
    pub escape_time: Option<f64>,
    pub threshold: u64,
    pub f2: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallChainEvents {
    pub lambda: f64,
    pub levels: Vec<LevelEvents>,
    pub all_hold: bool,
    pub first_failure: Option<usize>,
    pub truncated: bool,
}

/// Evaluates the travel-time and escape events at levels `2..=K` on the
/// realized passage times.
///
/// Sums between two vertices of the ray follow the ray; sums from a ball
/// centre to the rest of its ball follow the ray where it passes and the
/// lowest-id geodesic elsewhere.
pub fn check_ball_chain_events<T: Real, P: PassageTimes<f64>>(
    g: &Graph,
    trace: &Trace<T>,
    plan: &BallChainPlan,
    pt: &P,
    lambda: f64,
) -> Result<BallChainEvents> {
    if trace.pt_seed != pt.field_seed() {
        return Err(Error::Consistency(format!(
            "trace passage-time seed {:?} differs from field seed {:?}",
            trace.pt_seed,
            pt.field_seed()
        )));
    }
    evaluate_ball_chain(g, plan, pt, lambda)
}

/// [`check_ball_chain_events`] without a trace.
pub fn evaluate_ball_chain<P: PassageTimes<f64>>(
    g: &Graph,
    plan: &BallChainPlan,
    pt: &P,
    lambda: f64,
) -> Result<BallChainEvents> {
    if g.vertex_count() != plan.vertex_count {
        return Err(Error::Consistency(format!(
            "plan built on {} vertices, graph has {}",
            plan.vertex_count,
            g.vertex_count()
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let n = g.vertex_count();
    let inv = 1.0 / lambda;
    let ray = &plan.ray;
    let mut prefix = vec![0.0f64];
    for e in ray.windows(2) {
        let last = *prefix.last().expect("non-empty");
        prefix.push(last + pt.time(EdgeRef::by_id(e[0], e[1])));
    }
    let along = |i: usize, j: usize| (prefix[i.max(j)] - prefix[i.min(j)]).abs();
    let balls: Vec<VertexSet> = plan
        .balls
        .iter()
        .map(|b| VertexSet::from_iter_in(n, b.iter().copied()))
        .collect();
    let last_inside = |k: usize| {
        (0..ray.len())
            .rev()
            .find(|&i| balls[k - 1].contains(ray[i]))
            .expect("centre lies on the ray")
    };
    let spread = |k: usize| ball_spread(g, plan, pt, k, &balls[k - 1], &along);

    let mut levels = Vec::new();
    let mut budget_sum = 0u64;
    for k in 2..=plan.levels() {
        let budget = plan.budgets[k - 2];
        budget_sum += budget;
        let travel_time = if k == 2 {
            let w0 = plan.waypoint_index[0];
            let w1 = plan.waypoint_index[1];
            let w2 = plan.waypoint_index[2];
            let entry = w1 - (plan.radii[0] as usize).min(w1 - w0);
            inv.max(1.0) * along(w0, entry) + inv * (along(entry, w2) + spread(1) + spread(2))
        } else {
            inv * (along(last_inside(k - 1), last_inside(k)) + spread(k))
        };
        let f1 = budget as f64 >= travel_time;

        let removed = &balls[k - 2];
        let sources: Vec<VertexId> = plan.targets[k - 2]
            .iter()
            .copied()
            .filter(|&v| !removed.contains(v))
            .collect();
        let times = passage_distances(g, &sources, pt, Some(removed), budget_sum as f64);
        let escape_time = plan.boundaries[k - 2]
            .iter()
            .filter_map(|&v| times[v])
            .min_by(|a, b| a.total_cmp(b));
        let f2 = escape_time.is_none();
        levels.push(LevelEvents {
            k,
            travel_time,
            budget,
            f1,
            escape_time,
            threshold: budget_sum,
            f2,
            holds: f1 && f2,
        });
    }
    let first_failure = levels.iter().find(|l| !l.holds).map(|l| l.k);
    Ok(BallChainEvents {
        lambda,
        all_hold: first_failure.is_none(),
        first_failure,
        truncated: plan.truncated,
        levels,
    })
}

/// `max_{v ∈ B^(k)} T̄(w^(k) → v)`.
fn ball_spread<P: PassageTimes<f64>>(
    g: &Graph,
    plan: &BallChainPlan,
    pt: &P,
    k: usize,
    ball: &VertexSet,
    along: &impl Fn(usize, usize) -> f64,
) -> f64 {
    let centre = plan.waypoint(k);
    let ci = plan.waypoint_index[k];
    let r = plan.radii[k - 1] as usize;
    let lo = ci.saturating_sub(r);
    let hi = (ci + r).min(plan.ray.len() - 1);
    let mut on_ray: Vec<Option<usize>> = vec![None; g.vertex_count()];
    for i in lo..=hi {
        let v = plan.ray[i];
        if on_ray[v].is_none_or(|j| i.abs_diff(ci) < j.abs_diff(ci)) {
            on_ray[v] = Some(i);
        }
    }
    let dist = g.bfs_raw(&[centre], None, r as u32);
    let mut order: Vec<VertexId> = ball.iter().collect();
    order.sort_by_key(|&v| dist[v]);
    let mut tbar = vec![0.0f64; g.vertex_count()];
    let mut best = 0.0f64;
    for v in order {
        if v == centre {
            continue;
        }
        let parent = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| dist[u] != UNREACHABLE && dist[u] + 1 == dist[v])
            .min()
            .expect("BFS parent exists");
        tbar[v] = tbar[parent] + pt.time(EdgeRef::by_id(parent, v));
        let t = match on_ray[v] {
            Some(i) => along(i, ci),
            None => tbar[v],
        };
        best = best.max(t);
    }
    best
}
