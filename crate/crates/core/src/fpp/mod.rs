//! First-passage dynamics: FPPHE, the two-type Richardson model, single-type
//! FPP and passage-time tail calculators.

mod engine;
mod fields;
mod outcome;
mod single;
mod tail;

pub use engine::{
    run_fpphe, run_richardson, Cluster, Process, RunKind, StopReason, StopRule, Trace,
    VertexRecord, VertexState,
};
pub use fields::{
    ConstantTimes, EdgeRef, ExplicitSeeds, FnTimes, NoSeeds, OverrideTimes, PassageTimeField,
    PassageTimes, ScaledTimes, SeedField, SeedSource,
};
pub use outcome::{classify_outcome, OutcomeProxies};
pub use single::{
    linear_spread_check, passage_distances, run_single_fpp, OccupationMap, SpreadConfig,
    SpreadReport, SpreadRow,
};
pub use tail::{passage_tail_bounds, poisson_cdf, poisson_sf, TailBounds};
