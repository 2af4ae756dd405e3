use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::ScaleParams;
use crate::error::{Error, Result};
use crate::fpp::{passage_distances, EdgeRef, PassageTimes, SeedSource};
use crate::geometry::{build_cylinder, EmbeddedTree};
use crate::graph::{Graph, VertexId, VertexSet, UNREACHABLE};
use crate::rng;
use crate::scalar::Exact;

/// Limits above which the universal quantifiers are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckBudgets {
    /// Maximum number of `(w, t)` pairs checked for the sandwich.
    pub sandwich_pairs: usize,
    /// Maximum number of `(w, P)` pairs checked for path times.
    pub paths: usize,
    pub rng_seed: u64,
}

impl Default for CheckBudgets {
    fn default() -> Self {
        CheckBudgets {
            sandwich_pairs: 10_000,
            paths: 10_000,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

/// How much of a quantifier was checked. `total` is `None` when the
/// population was too large to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub checked: usize,
    pub total: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// A vertex of the inner ball not reached by the slow process.
    InnerBall {
        w: VertexId,
        t: u64,
        vertex: VertexId,
    },
    /// A vertex reached by the fast process outside the outer ball.
    OuterBall {
        w: VertexId,
        t: u64,
        vertex: VertexId,
    },
    /// A path crossed faster than `|P|/c_out`.
    PathTime {
        path: Vec<VertexId>,
        time: f64,
    },
    Seed {
        vertex: VertexId,
    },
}

/// Integer windows of the goodness conditions at scale `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Windows {
    pub width: usize,
    /// Inclusive range of `t`; empty when `t_min > t_max`.
    pub t_min: u64,
    pub t_max: u64,
    /// Inclusive range of path lengths, at least 1.
    pub len_min: usize,
    pub len_max: usize,
    /// Width of the seed-free cylinder (scale 1).
    pub seed_width: usize,
}

fn floor_e<E: Exact>(x: E) -> i64 {
    -((-x).ceil_to_i64())
}

/// Smallest integer `n >= 0` with `n² >= q`.
fn ceil_sqrt<E: Exact>(q: &E) -> u64 {
    let mut n = q.approx_f64().max(0.0).sqrt().floor() as u64;
    n = n.saturating_sub(2);
    loop {
        let nn = E::from_u64(n).expect("fits") * E::from_u64(n).expect("fits");
        if nn >= *q {
            return n;
        }
        n += 1;
    }
}

pub fn windows<E: Exact>(params: &ScaleParams<E>, j: usize) -> Windows {
    let jr = E::from_usize(j * params.r).expect("scale fits");
    let four = E::from_i64(4).expect("small integer");
    let c_in2 = params.c_in.clone() * params.c_in.clone();
    let width = floor_e(params.eps.clone() * jr.clone()).max(0) as usize;
    let t_min = ceil_sqrt(&(params.eps.clone() * jr.clone() * jr.clone()));
    let t_max = floor_e(four.clone() * params.c_out.clone() / c_in2.clone() * jr.clone()).max(-1);
    let scaled = params.c_out.clone() * jr.clone();
    let len_min = ceil_sqrt(&(params.eps.clone() * scaled.clone() * scaled)).max(1) as usize;
    let len_max =
        floor_e(four * params.c_out.clone() * params.c_out.clone() / c_in2 * jr).max(0) as usize;
    let r = E::from_usize(params.r).expect("scale fits");
    let seed_width = floor_e((params.eps.clone() + params.beta.clone()) * r).max(0) as usize;
    let (t_min, t_max) = if t_max < 0 {
        (1, 0)
    } else {
        (t_min, t_max as u64)
    };
    Windows {
        width,
        t_min,
        t_max,
        len_min,
        len_max,
        seed_width,
    }
}

impl Windows {
    pub fn t_count(&self) -> u64 {
        (self.t_max + 1).saturating_sub(self.t_min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderVerdict {
    /// Tree endpoints.
    pub x: usize,
    pub y: usize,
    pub scale: usize,
    pub windows: Windows,
    pub sandwich_ok: bool,
    pub path_time_ok: bool,
    /// Only evaluated at scale 1.
    pub seed_free_ok: Option<bool>,
    pub good: bool,
    pub mode: CheckMode,
    pub sandwich_coverage: Coverage,
    pub path_coverage: Coverage,
    pub budgets: CheckBudgets,
    /// First violation of each failing condition.
    pub violations: Vec<Violation>,
}

/// Checks whether the cylinder between tree vertices `x` and `y` is good at
/// scale `j = d_T(x, y)`.
pub fn check_good_cylinder<E: Exact, S: SeedSource, P: PassageTimes<f64>>(
    g: &Graph,
    emb: &EmbeddedTree,
    seeds: &S,
    pt: &P,
    x: usize,
    y: usize,
    params: &ScaleParams<E>,
    budgets: &CheckBudgets,
) -> Result<CylinderVerdict> {
    for t in [x, y] {
        if t == 0 || t > emb.size() {
            return Err(Error::Argument(format!(
                "tree vertex {t} is not in the embedding"
            )));
        }
    }
    let j = EmbeddedTree::tree_distance(x, y);
    if j == 0 {
        return Err(Error::Argument("cylinder endpoints must differ".into()));
    }
    let win = windows(params, j);
    let (gx, gy) = (emb.image(x), emb.image(y));
    let cyl = build_cylinder(g, gx, gy, win.width)?;
    let members = cyl.members.to_vec();
    let slow = params.f(&params.min_rate());
    let fast = params.f(&params.max_rate());
    let c_out = params.f(&params.c_out);
    let inner_radius = |t: u64| {
        floor_e(params.min_rate() * params.c_in.clone() * E::from_u64(t).expect("fits")) as u32
    };
    let outer_radius = |t: u64| {
        floor_e(params.max_rate() * params.c_out.clone() * E::from_u64(t).expect("fits")) as u32
    };

    let reach = if win.t_count() > 0 {
        outer_radius(win.t_max) as usize
    } else {
        0
    }
    .max(win.len_max);
    let hood = g.ball_around(&members, reach, None);
    if let Some(f) = hood.iter().find(|&v| g.is_frontier(v)) {
        return Err(Error::Frontier(format!(
            "vertex {f} lies within {reach} of the cylinder between {gx} and {gy}"
        )));
    }

    let mut violations = Vec::new();
    let mut sampler = rng::sampler(rng::derive_seed(&[budgets.rng_seed, x as u64, y as u64]));

    // Condition (a).
    let pairs_total = members.len() as u64 * win.t_count();
    let exhaustive_a = pairs_total <= budgets.sandwich_pairs as u64;
    let mut plan: Vec<(usize, Vec<u64>)> = Vec::new();
    if exhaustive_a {
        if win.t_count() > 0 {
            plan = members
                .iter()
                .map(|_| (win.t_min..=win.t_max).collect())
                .enumerate()
                .collect();
        }
    } else {
        let mut by_w: Vec<Vec<u64>> = vec![Vec::new(); members.len()];
        for _ in 0..budgets.sandwich_pairs {
            let w = sampler.random_range(0..members.len());
            by_w[w].push(sampler.random_range(win.t_min..=win.t_max));
        }
        plan = by_w
            .into_iter()
            .enumerate()
            .filter(|(_, ts)| !ts.is_empty())
            .collect();
    }
    let mut sandwich_ok = true;
    let mut checked_a = 0usize;
    'a: for (wi, ts) in &plan {
        let w = members[*wi];
        let t_top = *ts.iter().max().expect("non-empty");
        let raw = passage_distances(g, &[w], pt, None, t_top as f64 * fast);
        let hops = g.bfs_raw(&[w], None, outer_radius(t_top) + 1);
        for &t in ts {
            checked_a += 1;
            let tf = t as f64;
            let reached =
                |v: usize, rate: f64| raw[v].is_some_and(|d| d <= tf * rate && d / rate <= tf);
            let rin = inner_radius(t);
            let rout = outer_radius(t);
            if let Some(v) = (0..g.vertex_count()).find(|&v| hops[v] <= rin && !reached(v, slow)) {
                violations.push(Violation::InnerBall { w, t, vertex: v });
                sandwich_ok = false;
                break 'a;
            }
            if let Some(v) = (0..g.vertex_count())
                .find(|&v| reached(v, fast) && (hops[v] == UNREACHABLE || hops[v] > rout))
            {
                violations.push(Violation::OuterBall { w, t, vertex: v });
                sandwich_ok = false;
                break 'a;
            }
        }
    }
    let sandwich_coverage = Coverage {
        checked: checked_a,
        total: Some(pairs_total),
    };

    // Condition (b).
    let mut path_time_ok = true;
    let mut exhaustive_b = true;
    let mut checked_b = 0usize;
    let mut total_b = Some(0u64);
    if win.len_min <= win.len_max {
        let mut walker = PathWalker {
            g,
            pt,
            c_out,
            len_min: win.len_min,
            len_max: win.len_max,
            limit: budgets.paths,
            counted: 0,
            bad: None,
            on_path: VertexSet::empty(g.vertex_count()),
        };
        let mut finished = true;
        for &w in &members {
            if !walker.enumerate(w) {
                finished = false;
                break;
            }
            if walker.bad.is_some() {
                break;
            }
        }
        if finished {
            checked_b = walker.counted;
            total_b = if walker.bad.is_some() {
                None
            } else {
                Some(walker.counted as u64)
            };
            if let Some((path, time)) = walker.bad.take() {
                path_time_ok = false;
                violations.push(Violation::PathTime { path, time });
            }
        } else {
            exhaustive_b = false;
            total_b = None;
            let mut attempts = 0usize;
            while checked_b < budgets.paths && attempts < budgets.paths.saturating_mul(10) {
                attempts += 1;
                let w = members[sampler.random_range(0..members.len())];
                let len = sampler.random_range(win.len_min..=win.len_max);
                let Some(path) = random_self_avoiding(g, w, len, &mut sampler) else {
                    continue;
                };
                checked_b += 1;
                let time = path_time(pt, &path);
                if time < len as f64 / c_out {
                    path_time_ok = false;
                    violations.push(Violation::PathTime { path, time });
                    break;
                }
            }
        }
    }
    let path_coverage = Coverage {
        checked: checked_b,
        total: total_b,
    };

    // Seed-free widened cylinder, scale 1 only.
    let seed_free_ok = if j == 1 {
        let wide = build_cylinder(g, gx, gy, win.seed_width)?;
        if wide.frontier_touched {
            return Err(Error::Frontier(format!(
                "seed-free cylinder of width {} between {gx} and {gy}",
                win.seed_width
            )));
        }
        let hit = wide
            .members
            .iter()
            .find(|&v| v != g.origin() && seeds.is_seed(v, v as u64));
        if let Some(v) = hit {
            violations.push(Violation::Seed { vertex: v });
        }
        Some(hit.is_none())
    } else {
        None
    };

    let good = sandwich_ok && path_time_ok && seed_free_ok.unwrap_or(true);
    let mode = if exhaustive_a && exhaustive_b {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled
    };
    Ok(CylinderVerdict {
        x,
        y,
        scale: j,
        windows: win,
        sandwich_ok,
        path_time_ok,
        seed_free_ok,
        good,
        mode,
        sandwich_coverage,
        path_coverage,
        budgets: *budgets,
        violations,
    })
}

/// `T(P)` summed along the path in order.
pub fn path_time<P: PassageTimes<f64>>(pt: &P, path: &[VertexId]) -> f64 {
    path.windows(2)
        .fold(0.0, |acc, e| acc + pt.time(EdgeRef::by_id(e[0], e[1])))
}

struct PathWalker<'a, P> {
    g: &'a Graph,
    pt: &'a P,
    c_out: f64,
    len_min: usize,
    len_max: usize,
    limit: usize,
    counted: usize,
    bad: Option<(Vec<VertexId>, f64)>,
    on_path: VertexSet,
}

impl<P: PassageTimes<f64>> PathWalker<'_, P> {
    /// Checks every self-avoiding path from `w` in the length window.
    /// Returns `false` if the budget ran out first.
    fn enumerate(&mut self, w: VertexId) -> bool {
        let mut path = vec![w];
        self.on_path.insert(w);
        let ok = self.extend(&mut path, 0.0);
        self.on_path.remove(w);
        ok
    }

    fn extend(&mut self, path: &mut Vec<VertexId>, time: f64) -> bool {
        let len = path.len() - 1;
        if len >= self.len_min {
            if self.counted == self.limit {
                return false;
            }
            self.counted += 1;
            if time < len as f64 / self.c_out {
                self.bad = Some((path.clone(), time));
                return true;
            }
        }
        if len == self.len_max {
            return true;
        }
        let u = *path.last().expect("non-empty");
        for &v in self.g.neighbors(u) {
            if self.on_path.contains(v) {
                continue;
            }
            let t = time + self.pt.time(EdgeRef::by_id(u, v));
            path.push(v);
            self.on_path.insert(v);
            let ok = self.extend(path, t);
            self.on_path.remove(v);
            path.pop();
            if !ok {
                return false;
            }
            if self.bad.is_some() {
                return true;
            }
        }
        true
    }
}

fn random_self_avoiding(
    g: &Graph,
    w: VertexId,
    len: usize,
    rng: &mut impl Rng,
) -> Option<Vec<VertexId>> {
    let mut path = vec![w];
    let mut options = Vec::new();
    while path.len() <= len {
        let u = *path.last().expect("non-empty");
        options.clear();
        options.extend(g.neighbors(u).iter().copied().filter(|v| !path.contains(v)));
        if options.is_empty() {
            return None;
        }
        path.push(options[rng.random_range(0..options.len())]);
    }
    Some(path)
}
