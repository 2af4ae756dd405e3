use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::fields::{EdgeRef, PassageTimeField, PassageTimes};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::rng;
use crate::scalar::Real;
use crate::stats::{wilson, Z95};

/// Occupation times of a single first-passage process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OccupationMap<T> {
    pub rate: T,
    pub times: Vec<Option<T>>,
}

impl<T: Real> OccupationMap<T> {
    pub fn time(&self, v: VertexId) -> Option<T> {
        self.times[v]
    }

    /// `{y : T(x → y) <= t}`.
    pub fn sublevel(&self, t: T) -> VertexSet {
        VertexSet::from_predicate(self.times.len(), |v| self.times[v].is_some_and(|s| s <= t))
    }
}

struct Entry<T> {
    dist: T,
    v: VertexId,
}

impl<T: Real> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Entry<T> {}
impl<T: Real> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp_real(&self.dist)
            .then(other.v.cmp(&self.v))
    }
}

/// Multi-source shortest passage times under raw `t_e`, skipping `forbidden`
/// and not expanding past `cap`.
pub fn passage_distances<T: Real, P: PassageTimes<T>>(
    g: &Graph,
    sources: &[VertexId],
    pt: &P,
    forbidden: Option<&VertexSet>,
    cap: T,
) -> Vec<Option<T>> {
    let n = g.vertex_count();
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if forbidden.is_some_and(|f| f.contains(s)) {
            continue;
        }
        dist[s] = Some(T::zero());
        heap.push(Entry {
            dist: T::zero(),
            v: s,
        });
    }
    while let Some(Entry { dist: d, v: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if d > cap {
            dist[u] = None;
            continue;
        }
        for &v in g.neighbors(u) {
            if done[v] || forbidden.is_some_and(|f| f.contains(v)) {
                continue;
            }
            let nd = d + pt.time(EdgeRef::by_id(u, v));
            if dist[v].is_none_or(|old| nd < old) {
                dist[v] = Some(nd);
                heap.push(Entry { dist: nd, v });
            }
        }
    }
    for v in 0..n {
        if !done[v] || dist[v].is_some_and(|d| d > cap) {
            dist[v] = None;
        }
    }
    dist
}

/// First-passage times from `sources` at `rate`, up to `horizon`.
///
/// Shortest paths are computed on the raw `t_e` and divided by the rate at
/// the end, so changing the rate rescales every time exactly.
pub fn run_single_fpp<T: Real, P: PassageTimes<T>>(
    g: &Graph,
    sources: &VertexSet,
    rate: T,
    pt: &P,
    horizon: T,
) -> Result<OccupationMap<T>> {
    if sources.is_empty() {
        return Err(Error::Argument("single-type FPP needs a source".into()));
    }
    if !(rate > T::zero()) {
        return Err(Error::Parameter(format!(
            "rate must be positive, got {rate}"
        )));
    }
    let raw = passage_distances(g, &sources.to_vec(), pt, None, horizon * rate);
    let times = raw
        .into_iter()
        .map(|d| d.map(|d| d / rate).filter(|&t| t <= horizon))
        .collect();
    Ok(OccupationMap { rate, times })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadConfig {
    pub rate: f64,
    pub c_in: f64,
    pub c_out: f64,
    pub t_values: Vec<f64>,
    pub trials: usize,
    pub pt_seed_base: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadRow {
    pub t: f64,
    /// Frequency of `A_T ⊆ B(x, c_out·rate·T)`.
    pub outer: f64,
    pub outer_ci: (f64, f64),
    /// Frequency of `B(x, c_in·rate·T) ⊆ A_T`.
    pub inner: f64,
    pub inner_ci: (f64, f64),
    /// The frequency is incompatible with `1 - e^{-cT}` for the fitted `c`.
    pub outer_flag: bool,
    pub inner_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub rows: Vec<SpreadRow>,
    pub outer_rate_fit: Option<f64>,
    pub inner_rate_fit: Option<f64>,
}

/// Monte Carlo check of linear spreading of `A^x_T`.
pub fn linear_spread_check(g: &Graph, x: VertexId, cfg: &SpreadConfig) -> Result<SpreadReport> {
    if cfg.trials == 0 || cfg.t_values.is_empty() {
        return Err(Error::Argument("need trials and at least one T".into()));
    }
    let safe = g.safe_radius(x);
    let dist = g.bfs_raw(&[x], None, u32::MAX);
    let mut counts = Vec::new();
    for &t in &cfg.t_values {
        let outer_r = cfg.c_out * cfg.rate * t;
        if outer_r.is_finite() && outer_r.floor() as usize >= safe {
            return Err(Error::Range(format!(
                "outer radius {outer_r} reaches the truncation at distance {safe}"
            )));
        }
        let inner_r = cfg.c_in * cfg.rate * t;
        let (mut outer, mut inner) = (0usize, 0usize);
        for trial in 0..cfg.trials {
            let pt = PassageTimeField::new(rng::derive_seed(&[cfg.pt_seed_base, trial as u64]));
            let occ = run_single_fpp(
                g,
                &VertexSet::from_iter_in(g.vertex_count(), [x]),
                cfg.rate,
                &pt,
                t,
            )?;
            let within = |v: VertexId, r: f64| (dist[v] as f64) <= r;
            if (0..g.vertex_count()).all(|v| occ.times[v].is_none() || within(v, outer_r)) {
                outer += 1;
            }
            if (0..g.vertex_count()).all(|v| !within(v, inner_r) || occ.times[v].is_some()) {
                inner += 1;
            }
        }
        counts.push((t, outer, inner));
    }
    let n = cfg.trials;
    let fit = |pick: fn(&(f64, usize, usize)) -> usize| -> Option<f64> {
        let pts: Vec<(f64, f64)> = counts
            .iter()
            .filter(|c| pick(c) > 0 && pick(c) < n)
            .map(|c| (c.0, -(1.0 - pick(c) as f64 / n as f64).ln()))
            .collect();
        if pts.is_empty() {
            return None;
        }
        let num: f64 = pts.iter().map(|(t, y)| t * y).sum();
        let den: f64 = pts.iter().map(|(t, _)| t * t).sum();
        Some(num / den)
    };
    let outer_fit = fit(|c| c.1);
    let inner_fit = fit(|c| c.2);
    let flag = |k: usize, t: f64, c: Option<f64>| -> bool {
        let (lo, hi) = wilson(k, n, Z95);
        match c {
            Some(c) => {
                let p = 1.0 - (-c * t).exp();
                p < lo || p > hi
            }
            None => k == 0,
        }
    };
    let rows = counts
        .iter()
        .map(|&(t, o, i)| SpreadRow {
            t,
            outer: o as f64 / n as f64,
            outer_ci: wilson(o, n, Z95),
            inner: i as f64 / n as f64,
            inner_ci: wilson(i, n, Z95),
            outer_flag: flag(o, t, outer_fit),
            inner_flag: flag(i, t, inner_fit),
        })
        .collect();
    Ok(SpreadReport {
        rows,
        outer_rate_fit: outer_fit,
        inner_rate_fit: inner_fit,
    })
}
