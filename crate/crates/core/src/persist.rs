//! Versioned JSON documents.
//!
//! Every exported type is written inside an envelope
//! `{"body": …, "kind": …, "version": …}` with keys sorted at every level, so
//! equal values always produce identical bytes.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpp::{OccupationMap, OutcomeProxies, SpreadReport, TailBounds, Trace};
use crate::geometry::{EmbeddedTree, EscapeRay};
use crate::graph::GraphDoc;
use crate::mdla::MdlaState;
use crate::multiscale::{
    BallChainEvents, BallChainPlan, CylinderVerdict, GoodPathResult, ScaleParams,
};
use crate::scalar::Real;

pub trait Persist: Serialize + DeserializeOwned {
    const KIND: &'static str;
    const VERSION: u32 = 1;
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    kind: String,
    version: u32,
    body: serde_json::Value,
}

pub fn to_json<T: Persist>(value: &T) -> Result<String> {
    let env = Envelope {
        kind: T::KIND.to_owned(),
        version: T::VERSION,
        body: serde_json::to_value(value)?,
    };
    // `Value` objects are ordered maps, so a round trip through it sorts keys.
    let sorted = serde_json::to_value(env)?;
    let mut s = serde_json::to_string_pretty(&sorted)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: Persist>(text: &str) -> Result<T> {
    let env: Envelope = serde_json::from_str(text)?;
    if env.kind != T::KIND {
        return Err(Error::Kind {
            expected: T::KIND.to_owned(),
            found: env.kind,
        });
    }
    if env.version != T::VERSION {
        return Err(Error::Version {
            kind: env.kind,
            expected: T::VERSION,
            found: env.version,
        });
    }
    Ok(serde_json::from_value(env.body)?)
}

pub fn save<T: Persist>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn load<T: Persist>(path: impl AsRef<Path>) -> Result<T> {
    from_json(&fs::read_to_string(path)?)
}

impl<T: Real> Persist for Trace<T> {
    const KIND: &'static str = "trace";
}
impl<T: Real> Persist for OccupationMap<T> {
    const KIND: &'static str = "occupation-map";
}
impl<T: Real> Persist for MdlaState<T> {
    const KIND: &'static str = "mdla-state";
}
impl Persist for GraphDoc {
    const KIND: &'static str = "graph";
}
impl Persist for EmbeddedTree {
    const KIND: &'static str = "embedded-tree";
}
impl Persist for EscapeRay {
    const KIND: &'static str = "escape-ray";
}
impl Persist for ScaleParams<f64> {
    const KIND: &'static str = "scale-params";
}
impl Persist for CylinderVerdict {
    const KIND: &'static str = "cylinder-verdict";
}
impl Persist for Vec<CylinderVerdict> {
    const KIND: &'static str = "cylinder-verdicts";
}
impl Persist for GoodPathResult {
    const KIND: &'static str = "good-path";
}
impl Persist for BallChainPlan {
    const KIND: &'static str = "ball-chain-plan";
}
impl Persist for BallChainEvents {
    const KIND: &'static str = "ball-chain-events";
}
impl Persist for OutcomeProxies {
    const KIND: &'static str = "outcome";
}
impl Persist for TailBounds {
    const KIND: &'static str = "tail-bounds";
}
impl Persist for SpreadReport {
    const KIND: &'static str = "spread-report";
}
