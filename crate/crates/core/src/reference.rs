//! Slow implementations that follow the definitions literally.
//!
//! They share no code with the optimized routines beyond the random fields
//! and are meant as oracles on small inputs.

use std::collections::BTreeSet;

use crate::fpp::{run_single_fpp, EdgeRef, PassageTimes, Process, SeedSource, VertexState};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::mdla::{MdlaStop, Site};
use crate::multiscale::{ScaleParams, Windows};
use crate::scalar::Real;

/// Outcome of one vertex in a reference run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveRecord<T> {
    pub state: VertexState,
    pub time: Option<T>,
    pub pred: Option<VertexId>,
    pub activated_by: Option<Process>,
    pub cluster: Option<usize>,
}

/// Runs the competition to exhaustion by repeatedly scanning every edge from
/// an occupied vertex to an unoccupied one and executing the earliest attempt.
pub fn naive_fpphe<T: Real, P: PassageTimes<T>, S: SeedSource>(
    g: &Graph,
    lambda: T,
    pt: &P,
    seeds: &S,
) -> (Vec<NaiveRecord<T>>, Vec<VertexId>) {
    let n = g.vertex_count();
    let o = g.origin();
    let seed: Vec<bool> = (0..n)
        .map(|v| v != o && seeds.is_seed(v, v as u64))
        .collect();
    let mut rec: Vec<NaiveRecord<T>> = (0..n)
        .map(|v| NaiveRecord {
            state: if seed[v] {
                VertexState::DormantSeed
            } else {
                VertexState::Unreached
            },
            time: None,
            pred: None,
            activated_by: None,
            cluster: None,
        })
        .collect();
    let mut process: Vec<Option<Process>> = vec![None; n];
    rec[o].state = VertexState::Fpp1;
    rec[o].time = Some(T::zero());
    process[o] = Some(Process::Fpp1);
    let mut order = vec![o];
    let mut clusters = 0usize;
    loop {
        let mut best: Option<(T, Process, VertexId, VertexId)> = None;
        for u in 0..n {
            let Some(p) = process[u] else { continue };
            let tu = rec[u].time.expect("occupied vertices have times");
            for &v in g.neighbors(u) {
                if process[v].is_some() {
                    continue;
                }
                let te: T = pt.time(EdgeRef::by_id(u, v));
                let at = match p {
                    Process::Fpp1 => tu + te,
                    Process::Lambda => tu + te / lambda,
                };
                let cand = (at, p, v, u);
                let better = match best {
                    None => true,
                    Some(b) => (cand.0, cand.1, cand.2, cand.3) < (b.0, b.1, b.2, b.3),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let Some((at, p, v, u)) = best else { break };
        order.push(v);
        rec[v].time = Some(at);
        rec[v].pred = Some(u);
        if seed[v] {
            rec[v].activated_by = Some(p);
            rec[v].state = VertexState::Lambda;
            process[v] = Some(Process::Lambda);
            rec[v].cluster = match p {
                Process::Lambda => rec[u].cluster,
                Process::Fpp1 => {
                    clusters += 1;
                    Some(clusters - 1)
                }
            };
        } else {
            rec[v].state = match p {
                Process::Fpp1 => VertexState::Fpp1,
                Process::Lambda => VertexState::Lambda,
            };
            process[v] = Some(p);
            rec[v].cluster = match p {
                Process::Lambda => rec[u].cluster,
                Process::Fpp1 => None,
            };
        }
    }
    (rec, order)
}

/// Shortest passage times from `x` by Bellman-Ford relaxation.
pub fn bellman_ford<T: Real, P: PassageTimes<T>>(g: &Graph, x: VertexId, pt: &P) -> Vec<Option<T>> {
    let n = g.vertex_count();
    let mut d: Vec<Option<T>> = vec![None; n];
    d[x] = Some(T::zero());
    loop {
        let mut changed = false;
        for u in 0..n {
            let Some(du) = d[u] else { continue };
            for &v in g.neighbors(u) {
                let nd = du + pt.time(EdgeRef::by_id(u, v));
                if d[v].is_none_or(|old| nd < old) {
                    d[v] = Some(nd);
                    changed = true;
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Every self-avoiding path from `w` with between `lo` and `hi` edges.
pub fn self_avoiding_paths(g: &Graph, w: VertexId, lo: usize, hi: usize) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    let mut frontier = vec![vec![w]];
    for len in 1..=hi {
        let mut next = Vec::new();
        for p in &frontier {
            let last = *p.last().expect("non-empty");
            for &v in g.neighbors(last) {
                if !p.contains(&v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        if len >= lo {
            out.extend(next.iter().cloned());
        }
        frontier = next;
    }
    out
}

/// Sub-verdicts of the goodness conditions, enumerating every `(w, t)` and
/// every path. Cylinders are rebuilt from all geodesics by brute force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiteralVerdict {
    pub sandwich_ok: bool,
    pub path_time_ok: bool,
    pub seed_free_ok: Option<bool>,
    pub triples: usize,
}

pub fn literal_good_cylinder<S: SeedSource, P: PassageTimes<f64>>(
    g: &Graph,
    gx: VertexId,
    gy: VertexId,
    scale: usize,
    win: &Windows,
    params: &ScaleParams<f64>,
    seeds: &S,
    pt: &P,
) -> LiteralVerdict {
    let n = g.vertex_count();
    let dist = |a: VertexId| {
        let mut d = vec![usize::MAX; n];
        d[a] = 0;
        let mut q = std::collections::VecDeque::from([a]);
        while let Some(u) = q.pop_front() {
            for &v in g.neighbors(u) {
                if d[v] == usize::MAX {
                    d[v] = d[u] + 1;
                    q.push_back(v);
                }
            }
        }
        d
    };
    let all: Vec<Vec<usize>> = (0..n).map(dist).collect();
    let cylinder = |width: usize| -> BTreeSet<VertexId> {
        let on_geodesic: Vec<VertexId> = (0..n)
            .filter(|&v| all[gx][v].saturating_add(all[v][gy]) == all[gx][gy])
            .collect();
        (0..n)
            .filter(|&v| on_geodesic.iter().any(|&z| all[z][v] <= width))
            .collect()
    };
    let slow = params.lambda.min(1.0);
    let fast = params.lambda.max(1.0);
    let mut triples = 0;
    let mut sandwich_ok = true;
    let mut path_time_ok = true;
    let members = cylinder(win.width);
    for &w in &members {
        for t in win.t_min..=win.t_max {
            let tf = t as f64;
            let source = VertexSet::from_iter_in(n, [w]);
            let a_min = run_single_fpp(g, &source, slow, pt, tf)
                .expect("valid run")
                .sublevel(tf);
            let a_max = run_single_fpp(g, &source, fast, pt, tf)
                .expect("valid run")
                .sublevel(tf);
            let inner = slow * params.c_in * tf;
            let outer = fast * params.c_out * tf;
            for v in 0..n {
                let d = all[w][v] as f64;
                if d <= inner && !a_min.contains(v) {
                    sandwich_ok = false;
                }
                if a_min.contains(v) && !a_max.contains(v) {
                    sandwich_ok = false;
                }
                if a_max.contains(v) && !(all[w][v] != usize::MAX && d <= outer) {
                    sandwich_ok = false;
                }
            }
            triples += 1;
        }
        for p in self_avoiding_paths(g, w, win.len_min, win.len_max) {
            let mut time = 0.0;
            for e in p.windows(2) {
                time += pt.time(EdgeRef::by_id(e[0], e[1]));
            }
            if time < (p.len() - 1) as f64 / params.c_out {
                path_time_ok = false;
            }
            triples += 1;
        }
    }
    let seed_free_ok = (scale == 1).then(|| {
        cylinder(win.seed_width)
            .iter()
            .all(|&v| v == g.origin() || !seeds.is_seed(v, v as u64))
    });
    LiteralVerdict {
        sandwich_ok,
        path_time_ok,
        seed_free_ok,
        triples,
    }
}

/// Multi-particle aggregation executing the earliest pending ring found by
/// scanning all particles.
pub fn naive_mdla<T: Real>(
    lattice: &Graph,
    mut sites: Vec<Site>,
    seed: u64,
    stop: MdlaStop<T>,
) -> (Vec<Site>, Vec<VertexId>, T) {
    let slots = lattice.max_degree().max(1);
    let mut pos: Vec<VertexId> = (0..sites.len())
        .filter(|&v| sites[v] == Site::Particle)
        .collect();
    let m = pos.len();
    let mut next: Vec<Option<(T, usize)>> = (0..m)
        .map(|p| Some(crate::mdla::ring::<T>(seed, p, 0, slots)))
        .collect();
    let mut rings = vec![0u64; m];
    let mut size = sites.iter().filter(|&&s| s == Site::Aggregate).count();
    let mut now = T::zero();
    loop {
        if let MdlaStop::AggregateCap(c) = stop {
            if size >= c {
                return (sites, pos, now);
            }
        }
        let mut best: Option<usize> = None;
        for p in 0..m {
            if let Some((t, _)) = next[p] {
                if best.is_none_or(|b| t < next[b].expect("pending").0) {
                    best = Some(p);
                }
            }
        }
        let Some(p) = best else {
            return (sites, pos, now);
        };
        let (t, slot) = next[p].expect("pending");
        if let MdlaStop::Time(h) = stop {
            if t > h {
                return (sites, pos, h);
            }
        }
        now = t;
        rings[p] += 1;
        let x = pos[p];
        let mut frozen = false;
        if let Some(&y) = lattice.neighbors(x).get(slot) {
            match sites[y] {
                Site::Empty => {
                    sites[x] = Site::Empty;
                    sites[y] = Site::Particle;
                    pos[p] = y;
                }
                Site::Particle => {}
                Site::Aggregate => {
                    sites[x] = Site::Aggregate;
                    size += 1;
                    frozen = true;
                }
            }
        }
        next[p] = if frozen {
            None
        } else {
            let (wait, s) = crate::mdla::ring::<T>(seed, p, rings[p], slots);
            Some((t + wait, s))
        };
    }
}
