use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fields::{EdgeRef, PassageTimes, SeedSource};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::scalar::Real;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Fpp1 = 0,
    Lambda = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexState {
    Unreached,
    DormantSeed,
    Fpp1,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Fpphe,
    Richardson,
}

/// When a run ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "rule",
    content = "value",
    rename_all = "snake_case",
    bound = "T: Real"
)]
pub enum StopRule<T> {
    /// Process every attempt up to this time.
    Horizon(T),
    /// Stop once this many vertices are occupied.
    OccupiedCap(usize),
    /// Stop once FPP₁ reaches this depth or can no longer grow.
    Radius(usize),
    /// Stop once both processes are decided at this radius: FPP₁ reached it
    /// or is enclosed, and some FPPλ cluster spans it or nothing can grow.
    Settled(usize),
    /// Stop once any occupied vertex reaches this depth.
    AnyRadius(usize),
    /// Run until no attempt is pending.
    Exhaust,
}

impl<T: Real> fmt::Display for StopRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopRule::Horizon(t) => write!(f, "time:{t}"),
            StopRule::OccupiedCap(n) => write!(f, "cap:{n}"),
            StopRule::Radius(r) => write!(f, "radius:{r}"),
            StopRule::Settled(r) => write!(f, "settled:{r}"),
            StopRule::AnyRadius(r) => write!(f, "any-radius:{r}"),
            StopRule::Exhaust => write!(f, "exhaust"),
        }
    }
}

impl<T: Real> FromStr for StopRule<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("unrecognized stop rule '{s}'"));
        if s == "exhaust" {
            return Ok(StopRule::Exhaust);
        }
        let (name, value) = s.split_once(':').ok_or_else(bad)?;
        let int = || value.parse::<usize>().map_err(|_| bad());
        Ok(match name {
            "time" => {
                let t: f64 = value.parse().map_err(|_| bad())?;
                StopRule::Horizon(T::from_f64_lossy(t))
            }
            "cap" => StopRule::OccupiedCap(int()?),
            "radius" => StopRule::Radius(int()?),
            "settled" => StopRule::Settled(int()?),
            "any-radius" => StopRule::AnyRadius(int()?),
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    OccupiedCap,
    Radius,
    Settled,
    AnyRadius,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct VertexRecord<T> {
    pub state: VertexState,
    /// Occupation time, or activation time for seeds.
    pub time: Option<T>,
    /// Vertex whose attempt occupied or activated this one.
    pub pred: Option<VertexId>,
    pub seed: bool,
    /// Process that activated this seed.
    pub activated_by: Option<Process>,
    /// Index into [`Trace::clusters`] for FPPλ vertices.
    pub cluster: Option<usize>,
    pub depth: usize,
    pub key: u64,
}

impl<T> VertexRecord<T> {
    pub fn is_occupied(&self) -> bool {
        matches!(self.state, VertexState::Fpp1 | VertexState::Lambda)
    }
}

/// FPPλ vertices descending from one seed activated by FPP₁.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub root: VertexId,
    pub size: usize,
    pub min_depth: usize,
    pub max_depth: usize,
}

impl Cluster {
    /// `max_depth - min_depth`, a lower bound on the diameter.
    pub fn radial_extent(&self) -> usize {
        self.max_depth - self.min_depth
    }
}

/// Complete record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Trace<T> {
    pub kind: RunKind,
    pub lambda: T,
    pub mu: Option<f64>,
    pub pt_seed: Option<u64>,
    pub seed_seed: Option<u64>,
    pub origin: VertexId,
    pub stop: StopRule<T>,
    pub stop_reason: StopReason,
    /// An occupation happened after a frontier vertex was occupied, so the
    /// run may differ from the one on the untruncated graph.
    pub frontier_touched: bool,
    /// FPP₁ still had pending attempts at unoccupied vertices when the run ended.
    pub fpp1_open: bool,
    pub lambda_open: bool,
    pub end_time: T,
    pub vertices: Vec<VertexRecord<T>>,
    /// Occupations and activations in processing order.
    pub order: Vec<VertexId>,
    pub clusters: Vec<Cluster>,
}

impl<T: Real> Trace<T> {
    pub fn occupied_count(&self) -> usize {
        self.order.len()
    }

    pub fn count(&self, state: VertexState) -> usize {
        self.vertices.iter().filter(|r| r.state == state).count()
    }

    pub fn seeds(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter_map(|(v, r)| r.seed.then_some(v))
    }

    pub fn fpp1_max_depth(&self) -> usize {
        self.vertices
            .iter()
            .filter(|r| r.state == VertexState::Fpp1)
            .map(|r| r.depth)
            .max()
            .unwrap_or(0)
    }

    /// Occupation time of `v`, if occupied.
    pub fn time(&self, v: VertexId) -> Option<T> {
        self.vertices
            .get(v)
            .and_then(|r| if r.is_occupied() { r.time } else { None })
    }
}

#[derive(Debug, Clone, Copy)]
struct Attempt<T> {
    time: T,
    process: Process,
    target: VertexId,
    source: VertexId,
}

impl<T: Real> Attempt<T> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp_real(&other.time)
            .then(self.process.cmp(&other.process))
            .then(self.target.cmp(&other.target))
            .then(self.source.cmp(&other.source))
    }
}

impl<T: Real> PartialEq for Attempt<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Attempt<T> {}

impl<T: Real> PartialOrd for Attempt<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Attempt<T> {
    // reversed: BinaryHeap pops the earliest attempt
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

struct Sim<'a, T: Real, G: Topology, P, S> {
    topo: G,
    lambda: T,
    pt: &'a P,
    seeds: &'a S,
    stop: StopRule<T>,
    heap: BinaryHeap<Attempt<T>>,
    records: Vec<VertexRecord<T>>,
    seed_known: Vec<bool>,
    pending: Vec<[u32; 2]>,
    live: [usize; 2],
    order: Vec<VertexId>,
    clusters: Vec<Cluster>,
    frontier_touched: bool,
    /// Processes that occupied a frontier vertex; their growth past it is unknown.
    on_frontier: [bool; 2],
    fpp1_depth: usize,
    max_extent: usize,
    any_depth: usize,
    buf: Vec<VertexId>,
}

impl<'a, T, G, P, S> Sim<'a, T, G, P, S>
where
    T: Real,
    G: Topology,
    P: PassageTimes<T>,
    S: SeedSource,
{
    fn new(topo: G, lambda: T, pt: &'a P, seeds: &'a S, stop: StopRule<T>) -> Self {
        let mut sim = Sim {
            topo,
            lambda,
            pt,
            seeds,
            stop,
            heap: BinaryHeap::new(),
            records: Vec::new(),
            seed_known: Vec::new(),
            pending: Vec::new(),
            live: [0, 0],
            order: Vec::new(),
            clusters: Vec::new(),
            frontier_touched: false,
            on_frontier: [false, false],
            fpp1_depth: 0,
            max_extent: 0,
            any_depth: 0,
            buf: Vec::new(),
        };
        sim.grow();
        sim
    }

    fn grow(&mut self) {
        let n = self.topo.vertex_count();
        while self.records.len() < n {
            let v = self.records.len();
            self.records.push(VertexRecord {
                state: VertexState::Unreached,
                time: None,
                pred: None,
                seed: false,
                activated_by: None,
                cluster: None,
                depth: self.topo.depth(v),
                key: self.topo.vertex_key(v),
            });
            self.seed_known.push(false);
            self.pending.push([0, 0]);
        }
    }

    fn is_seed(&mut self, v: VertexId) -> bool {
        if !self.seed_known[v] {
            self.seed_known[v] = true;
            let seed = v != self.topo.origin() && self.seeds.is_seed(v, self.records[v].key);
            self.records[v].seed = seed;
            if seed {
                self.records[v].state = VertexState::DormantSeed;
            }
        }
        self.records[v].seed
    }

    fn occupy(&mut self, v: VertexId, process: Process, time: T, pred: Option<VertexId>) {
        if self.on_frontier.iter().any(|&f| f) {
            self.frontier_touched = true;
        }
        let [a, b] = std::mem::take(&mut self.pending[v]);
        self.live[0] -= a as usize;
        self.live[1] -= b as usize;
        let depth = self.records[v].depth;
        let cluster = match process {
            Process::Fpp1 => None,
            Process::Lambda => {
                let inherited = pred.and_then(|p| self.records[p].cluster);
                Some(inherited.unwrap_or_else(|| {
                    self.clusters.push(Cluster {
                        root: v,
                        size: 0,
                        min_depth: depth,
                        max_depth: depth,
                    });
                    self.clusters.len() - 1
                }))
            }
        };
        let rec = &mut self.records[v];
        rec.state = match process {
            Process::Fpp1 => VertexState::Fpp1,
            Process::Lambda => VertexState::Lambda,
        };
        rec.time = Some(time);
        rec.pred = pred;
        rec.cluster = cluster;
        self.order.push(v);
        self.any_depth = self.any_depth.max(depth);
        match cluster {
            None => self.fpp1_depth = self.fpp1_depth.max(depth),
            Some(c) => {
                let cl = &mut self.clusters[c];
                cl.size += 1;
                cl.min_depth = cl.min_depth.min(depth);
                cl.max_depth = cl.max_depth.max(depth);
                self.max_extent = self.max_extent.max(cl.radial_extent());
            }
        }
        if self.topo.is_frontier(v) {
            self.on_frontier[process as usize] = true;
        }
        self.spread(v, process, time);
    }

    fn spread(&mut self, u: VertexId, process: Process, time: T) {
        let mut buf = std::mem::take(&mut self.buf);
        buf.clear();
        self.topo.neighbors_into(u, &mut buf);
        self.grow();
        let key_u = self.records[u].key;
        for &v in &buf {
            if self.records[v].is_occupied() {
                continue;
            }
            let te = self.pt.time(EdgeRef {
                u,
                v,
                key_u,
                key_v: self.records[v].key,
            });
            let at = match process {
                Process::Fpp1 => time + te,
                Process::Lambda => time + te / self.lambda,
            };
            self.heap.push(Attempt {
                time: at,
                process,
                target: v,
                source: u,
            });
            self.live[process as usize] += 1;
            self.pending[v][process as usize] += 1;
        }
        self.buf = buf;
    }

    fn is_live(&self, process: usize) -> bool {
        self.live[process] > 0 || self.on_frontier[process]
    }

    fn stop_reached(&self) -> Option<StopReason> {
        let fpp1_stuck = !self.is_live(0);
        match self.stop {
            StopRule::OccupiedCap(n) if self.order.len() >= n => Some(StopReason::OccupiedCap),
            StopRule::Radius(r) if self.fpp1_depth >= r || fpp1_stuck => Some(StopReason::Radius),
            StopRule::AnyRadius(r) if self.any_depth >= r => Some(StopReason::AnyRadius),
            StopRule::Settled(r) => {
                let fpp1_done = self.fpp1_depth >= r || fpp1_stuck;
                let lambda_done = self.max_extent >= r || (fpp1_stuck && !self.is_live(1));
                (fpp1_done && lambda_done).then_some(StopReason::Settled)
            }
            _ => None,
        }
    }

    fn run(&mut self) -> (StopReason, T) {
        let mut end = T::zero();
        if let Some(reason) = self.stop_reached() {
            return (reason, end);
        }
        while let Some(a) = self.heap.pop() {
            if let StopRule::Horizon(h) = self.stop {
                if a.time > h {
                    self.heap.push(a);
                    return (StopReason::Horizon, h);
                }
            }
            let v = a.target;
            if self.records[v].is_occupied() {
                continue;
            }
            self.live[a.process as usize] -= 1;
            self.pending[v][a.process as usize] -= 1;
            end = a.time;
            if self.is_seed(v) {
                self.records[v].activated_by = Some(a.process);
                let pred = match a.process {
                    Process::Lambda => Some(a.source),
                    Process::Fpp1 => None,
                };
                self.occupy(v, Process::Lambda, a.time, pred);
                self.records[v].pred = Some(a.source);
            } else {
                self.occupy(v, a.process, a.time, Some(a.source));
            }
            if let Some(reason) = self.stop_reached() {
                return (reason, end);
            }
        }
        match self.stop {
            StopRule::Horizon(h) => (StopReason::Horizon, h),
            _ => (StopReason::Exhausted, end),
        }
    }

    fn finish(mut self, kind: RunKind, reason: StopReason, end: T) -> Trace<T> {
        for v in 0..self.records.len() {
            self.is_seed(v);
        }
        let (mu, seed_seed) = match self.seeds.describe() {
            Some((mu, s)) => (Some(mu), Some(s)),
            None => (None, None),
        };
        Trace {
            kind,
            lambda: self.lambda,
            mu,
            pt_seed: self.pt.field_seed(),
            seed_seed,
            origin: self.topo.origin(),
            stop: self.stop,
            stop_reason: reason,
            frontier_touched: self.frontier_touched,
            fpp1_open: self.is_live(0),
            lambda_open: self.is_live(1),
            end_time: end,
            vertices: self.records,
            order: self.order,
            clusters: self.clusters,
        }
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )))
    }
}

/// Runs FPPHE from the origin of `topo`.
///
/// Ties between attempts at equal times resolve by process (FPP₁ first),
/// then target id, then source id.
pub fn run_fpphe<T, G, P, S>(
    topo: G,
    lambda: T,
    pt: &P,
    seeds: &S,
    stop: StopRule<T>,
) -> Result<Trace<T>>
where
    T: Real,
    G: Topology,
    P: PassageTimes<T>,
    S: SeedSource,
{
    check_lambda(lambda)?;
    if let Some((mu, _)) = seeds.describe() {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::Parameter(format!("mu must lie in [0,1), got {mu}")));
        }
    }
    let mut sim = Sim::new(topo, lambda, pt, seeds, stop);
    let o = sim.topo.origin();
    sim.seed_known[o] = true;
    sim.occupy(o, Process::Fpp1, T::zero(), None);
    let (reason, end) = sim.run();
    Ok(sim.finish(RunKind::Fpphe, reason, end))
}

/// Two-type Richardson model: FPPλ starts active at `seed_vertex` at time 0.
pub fn run_richardson<T, G, P>(
    topo: G,
    lambda: T,
    seed_vertex: VertexId,
    pt: &P,
    stop: StopRule<T>,
) -> Result<Trace<T>>
where
    T: Real,
    G: Topology,
    P: PassageTimes<T>,
{
    check_lambda(lambda)?;
    let seeds = super::fields::ExplicitSeeds::new([seed_vertex]);
    let mut sim = Sim::new(topo, lambda, pt, &seeds, stop);
    let o = sim.topo.origin();
    if seed_vertex == o || seed_vertex >= sim.records.len() {
        return Err(Error::Argument(format!(
            "invalid Richardson seed vertex {seed_vertex}"
        )));
    }
    sim.seed_known[o] = true;
    sim.is_seed(seed_vertex);
    sim.occupy(o, Process::Fpp1, T::zero(), None);
    sim.occupy(seed_vertex, Process::Lambda, T::zero(), None);
    let (reason, end) = sim.run();
    let mut trace = sim.finish(RunKind::Richardson, reason, end);
    trace.mu = Some(0.0);
    trace.seed_seed = None;
    Ok(trace)
}
