use serde::{Deserialize, Serialize};

use super::{Family, Graph, VertexId};
use crate::error::{Error, Result};

/// Serializable form of a [`Graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertex_count: usize,
    pub origin: VertexId,
    pub family: Family,
    pub edges: Vec<(VertexId, VertexId)>,
    pub frontier: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<[f64; 2]>>,
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        GraphDoc {
            vertex_count: g.vertex_count(),
            origin: g.origin(),
            family: g.family().clone(),
            edges: g.edges().collect(),
            frontier: g.frontier().collect(),
            layout: g.layout().map(<[_]>::to_vec),
        }
    }
}

impl TryFrom<GraphDoc> for Graph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<Graph> {
        let mut flags = vec![false; doc.vertex_count];
        for &v in &doc.frontier {
            *flags
                .get_mut(v)
                .ok_or_else(|| Error::Argument(format!("frontier vertex {v} out of range")))? =
                true;
        }
        let g = Graph::from_edges(doc.vertex_count, &doc.edges, doc.origin, doc.family)?
            .with_frontier(flags)?;
        match doc.layout {
            Some(l) => g.with_layout(l),
            None => Ok(g),
        }
    }
}
