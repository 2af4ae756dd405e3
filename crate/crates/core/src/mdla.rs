//! Multi-particle diffusion limited aggregation.
//!
//! Particles perform a simple exclusion process with rate-one clocks attached
//! to particles. When a ring selects an aggregate site, the particle freezes
//! in place and its site joins the aggregate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::{self, Stream};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    Empty,
    Particle,
    Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "rule",
    content = "value",
    rename_all = "snake_case",
    bound = "T: Real"
)]
pub enum MdlaStop<T> {
    Time(T),
    AggregateCap(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GrowthPoint<T> {
    pub time: T,
    pub size: usize,
    pub radius: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MdlaState<T> {
    pub rho: f64,
    pub seed: u64,
    pub time: T,
    pub sites: Vec<Site>,
    /// Current site of every particle, frozen ones included.
    pub positions: Vec<VertexId>,
    pub frozen: Vec<bool>,
    /// Clock rings consumed per particle.
    pub rings: Vec<u64>,
    pub growth: Vec<GrowthPoint<T>>,
    pub frontier_touched: bool,
}

impl<T: Real> MdlaState<T> {
    pub fn aggregate_size(&self) -> usize {
        self.sites.iter().filter(|&&s| s == Site::Aggregate).count()
    }

    pub fn active_particles(&self) -> usize {
        self.frozen.iter().filter(|&&f| !f).count()
    }
}

/// Waiting time and neighbor slot of ring `k` of particle `p`.
pub(crate) fn ring<T: Real>(seed: u64, p: usize, k: u64, slots: usize) -> (T, usize) {
    let mut r = rng::keyed(seed, Stream::Mdla, rng::mix(p as u64) ^ k);
    let wait: f64 = Exp1.sample(&mut r);
    (T::from_f64_lossy(wait), r.random_range(0..slots))
}

#[derive(Debug, Clone, Copy)]
struct Ring<T> {
    time: T,
    particle: usize,
}

impl<T: Real> PartialEq for Ring<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Ring<T> {}
impl<T: Real> PartialOrd for Ring<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Ring<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp_real(&self.time)
            .then(other.particle.cmp(&self.particle))
    }
}

/// Random initialization: the origin is aggregate, every other site holds a
/// particle with probability `rho`.
pub fn initial_sites(lattice: &Graph, rho: f64, seed: u64) -> Vec<Site> {
    (0..lattice.vertex_count())
        .map(|v| {
            if v == lattice.origin() {
                Site::Aggregate
            } else if rng::uniform(seed, Stream::Mdla, rng::mix(!(v as u64))) < rho {
                Site::Particle
            } else {
                Site::Empty
            }
        })
        .collect()
}

pub fn run_mdla<T: Real>(
    lattice: &Graph,
    rho: f64,
    seed: u64,
    stop: MdlaStop<T>,
) -> Result<MdlaState<T>> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Parameter(format!(
            "rho must lie in (0,1), got {rho}"
        )));
    }
    run_mdla_from(lattice, initial_sites(lattice, rho, seed), rho, seed, stop)
}

/// Runs from an explicit configuration.
///
/// Neighbor choice is uniform over `max_degree` slots; slots beyond a site's
/// degree (outside the box) suppress the jump.
pub fn run_mdla_from<T: Real>(
    lattice: &Graph,
    sites: Vec<Site>,
    rho: f64,
    seed: u64,
    stop: MdlaStop<T>,
) -> Result<MdlaState<T>> {
    if sites.len() != lattice.vertex_count() {
        return Err(Error::Argument(
            "initial configuration has the wrong length".into(),
        ));
    }
    if sites[lattice.origin()] != Site::Aggregate {
        return Err(Error::Argument(
            "the origin must start in the aggregate".into(),
        ));
    }
    let slots = lattice.max_degree().max(1);
    let positions: Vec<VertexId> = (0..sites.len())
        .filter(|&v| sites[v] == Site::Particle)
        .collect();
    let n = positions.len();
    let mut st = MdlaState {
        rho,
        seed,
        time: T::zero(),
        sites,
        positions,
        frozen: vec![false; n],
        rings: vec![0; n],
        growth: Vec::new(),
        frontier_touched: false,
    };
    let mut size = st.aggregate_size();
    let mut radius = (0..st.sites.len())
        .filter(|&v| st.sites[v] == Site::Aggregate)
        .filter_map(|v| lattice.depth(v))
        .max()
        .unwrap_or(0);
    st.growth.push(GrowthPoint {
        time: T::zero(),
        size,
        radius,
    });
    let mut heap = BinaryHeap::new();
    let mut pending_slot = vec![0usize; n];
    for p in 0..n {
        let (wait, slot) = ring::<T>(seed, p, 0, slots);
        pending_slot[p] = slot;
        heap.push(Ring {
            time: wait,
            particle: p,
        });
    }
    let done = |size: usize, time: T| match stop {
        MdlaStop::Time(h) => time > h,
        MdlaStop::AggregateCap(c) => size >= c,
    };
    if done(size, T::zero()) {
        return Ok(st);
    }
    while let Some(Ring { time, particle: p }) = heap.pop() {
        if let MdlaStop::Time(h) = stop {
            if time > h {
                st.time = h;
                return Ok(st);
            }
        }
        st.time = time;
        st.rings[p] += 1;
        let x = st.positions[p];
        let nbrs = lattice.neighbors(x);
        let slot = pending_slot[p];
        if let Some(&y) = nbrs.get(slot) {
            match st.sites[y] {
                Site::Empty => {
                    st.sites[x] = Site::Empty;
                    st.sites[y] = Site::Particle;
                    st.positions[p] = y;
                }
                Site::Particle => {}
                Site::Aggregate => {
                    st.sites[x] = Site::Aggregate;
                    st.frozen[p] = true;
                    size += 1;
                    radius = radius.max(lattice.depth(x).unwrap_or(0));
                    if lattice.is_frontier(x) {
                        st.frontier_touched = true;
                    }
                    st.growth.push(GrowthPoint { time, size, radius });
                    if done(size, time) {
                        return Ok(st);
                    }
                    continue;
                }
            }
        }
        let (wait, next_slot) = ring::<T>(seed, p, st.rings[p], slots);
        pending_slot[p] = next_slot;
        heap.push(Ring {
            time: time + wait,
            particle: p,
        });
    }
    Ok(st)
}
