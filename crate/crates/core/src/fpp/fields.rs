use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::VertexId;
use crate::rng::{self, Stream};
use crate::scalar::Real;

/// An edge as seen by a random field: ids plus stable keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    pub u: VertexId,
    pub v: VertexId,
    pub key_u: u64,
    pub key_v: u64,
}

impl EdgeRef {
    /// Edge between two vertices whose key is their id.
    pub fn by_id(u: VertexId, v: VertexId) -> Self {
        EdgeRef {
            u,
            v,
            key_u: u as u64,
            key_v: v as u64,
        }
    }

    pub fn ends(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

/// Source of edge passage times `t_e`.
pub trait PassageTimes<T: Real>: Sync {
    /// Time of the undirected edge; must be symmetric in its endpoints.
    fn time(&self, e: EdgeRef) -> T;

    /// Seed of the underlying random field, if there is one.
    fn field_seed(&self) -> Option<u64> {
        None
    }
}

impl<T: Real, P: PassageTimes<T> + ?Sized> PassageTimes<T> for &P {
    fn time(&self, e: EdgeRef) -> T {
        (**self).time(e)
    }

    fn field_seed(&self) -> Option<u64> {
        (**self).field_seed()
    }
}

/// I.i.d. mean-one exponential times, a pure function of `(seed, edge)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageTimeField {
    pub seed: u64,
}

impl PassageTimeField {
    pub fn new(seed: u64) -> Self {
        PassageTimeField { seed }
    }

    pub fn raw(&self, key_u: u64, key_v: u64) -> f64 {
        rng::exp1(self.seed, Stream::PassageTime, rng::pair_key(key_u, key_v))
    }
}

impl<T: Real> PassageTimes<T> for PassageTimeField {
    fn time(&self, e: EdgeRef) -> T {
        let t = T::from_f64_lossy(self.raw(e.key_u, e.key_v));
        if t > T::zero() {
            t
        } else {
            T::min_positive_value()
        }
    }

    fn field_seed(&self) -> Option<u64> {
        Some(self.seed)
    }
}

/// Every edge has the same time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTimes<T>(pub T);

impl<T: Real> PassageTimes<T> for ConstantTimes<T> {
    fn time(&self, _e: EdgeRef) -> T {
        self.0
    }
}

/// Times given by a function of the sorted endpoint ids.
pub struct FnTimes<F>(pub F);

impl<T: Real, F: Fn(VertexId, VertexId) -> T + Sync> PassageTimes<T> for FnTimes<F> {
    fn time(&self, e: EdgeRef) -> T {
        let (a, b) = e.ends();
        (self.0)(a, b)
    }
}

/// A base field with some edges pinned to given values.
#[derive(Debug, Clone)]
pub struct OverrideTimes<T, P> {
    base: P,
    pinned: HashMap<(VertexId, VertexId), T>,
}

impl<T: Real, P: PassageTimes<T>> OverrideTimes<T, P> {
    pub fn new(base: P) -> Self {
        OverrideTimes {
            base,
            pinned: HashMap::new(),
        }
    }

    pub fn set(&mut self, u: VertexId, v: VertexId, t: T) -> &mut Self {
        self.pinned.insert((u.min(v), u.max(v)), t);
        self
    }
}

impl<T: Real, P: PassageTimes<T>> PassageTimes<T> for OverrideTimes<T, P> {
    fn time(&self, e: EdgeRef) -> T {
        match self.pinned.get(&e.ends()) {
            Some(&t) => t,
            None => self.base.time(e),
        }
    }

    fn field_seed(&self) -> Option<u64> {
        self.base.field_seed()
    }
}

/// A base field multiplied by a constant.
#[derive(Debug, Clone, Copy)]
pub struct ScaledTimes<T, P> {
    pub base: P,
    pub factor: T,
}

impl<T: Real, P: PassageTimes<T>> PassageTimes<T> for ScaledTimes<T, P> {
    fn time(&self, e: EdgeRef) -> T {
        self.base.time(e) * self.factor
    }
}

/// Which vertices carry a dormant seed. The origin is excluded by the engine.
pub trait SeedSource: Sync {
    fn is_seed(&self, v: VertexId, key: u64) -> bool;

    /// `(density, seed)` of the underlying Bernoulli field, if any.
    fn describe(&self) -> Option<(f64, u64)> {
        None
    }
}

/// Independent Bernoulli(`mu`) seeds, a pure function of `(seed, vertex)`.
///
/// A vertex is a seed iff its uniform variable is below `mu`, so fields with
/// the same seed are nested in `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedField {
    pub seed: u64,
    pub mu: f64,
}

impl SeedField {
    pub fn new(seed: u64, mu: f64) -> Self {
        SeedField { seed, mu }
    }

    pub fn uniform(&self, key: u64) -> f64 {
        rng::uniform(self.seed, Stream::Seed, key)
    }
}

impl SeedSource for SeedField {
    fn is_seed(&self, _v: VertexId, key: u64) -> bool {
        self.mu > 0.0 && self.uniform(key) < self.mu
    }

    fn describe(&self) -> Option<(f64, u64)> {
        Some((self.mu, self.seed))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoSeeds;

impl SeedSource for NoSeeds {
    fn is_seed(&self, _v: VertexId, _key: u64) -> bool {
        false
    }

    fn describe(&self) -> Option<(f64, u64)> {
        Some((0.0, 0))
    }
}

/// A fixed set of seed vertices, by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplicitSeeds(pub HashSet<VertexId>);

impl ExplicitSeeds {
    pub fn new(seeds: impl IntoIterator<Item = VertexId>) -> Self {
        ExplicitSeeds(seeds.into_iter().collect())
    }
}

impl SeedSource for ExplicitSeeds {
    fn is_seed(&self, v: VertexId, _key: u64) -> bool {
        self.0.contains(&v)
    }
}
