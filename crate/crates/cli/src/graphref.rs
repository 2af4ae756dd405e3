use std::path::PathBuf;

use fpphe::graph::{
    generate_free_product, generate_lattice, generate_regular_tree, generate_tessellation,
    three_regular_tree, GraphDoc,
};
use fpphe::persist::load;
use fpphe::topology::{LazyRegularTree, LazyTriangulation};
use fpphe::Graph;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A graph named by generator parameters or by a saved document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphRef {
    Tree {
        branching: usize,
        depth: usize,
    },
    /// Ball in the 3-regular tree.
    ThreeRegular {
        radius: usize,
    },
    Lattice {
        dim: usize,
        radius: usize,
    },
    FreeProduct {
        factors: Vec<usize>,
        radius: usize,
    },
    Tessellation {
        p: usize,
        q: usize,
        layers: usize,
    },
    File {
        path: PathBuf,
    },
    /// The whole `{3,q}` triangulation, generated as the run explores it.
    LazyTessellation {
        q: usize,
    },
    /// The whole `degree`-regular tree, generated as the run explores it.
    LazyTree {
        degree: usize,
    },
}

/// Where runs take place: a finite ball with a frontier, or an unbounded
/// graph built on demand.
#[derive(Debug, Clone)]
pub enum Host {
    Finite(Graph),
    LazyTessellation(usize),
    LazyTree(usize),
}

impl GraphRef {
    pub fn build(&self) -> Result<Graph> {
        Ok(match self {
            GraphRef::Tree { branching, depth } => generate_regular_tree(*branching, *depth)?,
            GraphRef::ThreeRegular { radius } => three_regular_tree(*radius)?,
            GraphRef::Lattice { dim, radius } => generate_lattice(*dim, *radius)?,
            GraphRef::FreeProduct { factors, radius } => generate_free_product(factors, *radius)?,
            GraphRef::Tessellation { p, q, layers } => generate_tessellation(*p, *q, *layers)?,
            GraphRef::File { path } => Graph::try_from(load::<GraphDoc>(path)?)?,
            GraphRef::LazyTessellation { .. } | GraphRef::LazyTree { .. } => {
                return Err(CliError::Usage(
                    "an on-demand graph has no finite form".into(),
                ))
            }
        })
    }

    pub fn is_lazy(&self) -> bool {
        matches!(
            self,
            GraphRef::LazyTessellation { .. } | GraphRef::LazyTree { .. }
        )
    }

    pub fn host(&self) -> Result<Host> {
        Ok(match self {
            GraphRef::LazyTessellation { q } => {
                LazyTriangulation::new(*q)?;
                Host::LazyTessellation(*q)
            }
            GraphRef::LazyTree { degree } => {
                LazyRegularTree::new(*degree)?;
                Host::LazyTree(*degree)
            }
            other => Host::Finite(other.build()?),
        })
    }
}
