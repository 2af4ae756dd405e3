//! Neighborhood oracles for the simulation engine.
//!
//! The engine only needs to ask for neighbors, hop depth from the origin and
//! frontier flags, so it can run on a materialized [`Graph`] or on a graph
//! whose vertices are generated on demand.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng;

pub trait Topology {
    fn origin(&self) -> VertexId;

    /// Appends the neighbors of `v` to `out` in a fixed order.
    fn neighbors_into(&mut self, v: VertexId, out: &mut Vec<VertexId>);

    /// Hop distance from the origin.
    fn depth(&self, v: VertexId) -> usize;

    fn is_frontier(&self, v: VertexId) -> bool;

    /// Stable identity used to key random fields; independent of exploration order.
    fn vertex_key(&self, v: VertexId) -> u64;

    /// Number of vertices known so far.
    fn vertex_count(&self) -> usize;
}

impl Topology for &Graph {
    fn origin(&self) -> VertexId {
        Graph::origin(self)
    }

    fn neighbors_into(&mut self, v: VertexId, out: &mut Vec<VertexId>) {
        out.extend_from_slice(self.neighbors(v));
    }

    fn depth(&self, v: VertexId) -> usize {
        Graph::depth(self, v).unwrap_or(usize::MAX)
    }

    fn is_frontier(&self, v: VertexId) -> bool {
        Graph::is_frontier(self, v)
    }

    fn vertex_key(&self, v: VertexId) -> u64 {
        v as u64
    }

    fn vertex_count(&self) -> usize {
        Graph::vertex_count(self)
    }
}

#[derive(Debug, Clone)]
struct Node {
    layer: u32,
    /// Parent owning this vertex; the origin owns layer 1.
    owner: VertexId,
    /// Position among the owner's children.
    index: u32,
    parents: u8,
    key: u64,
    prev: Option<VertexId>,
    next: Option<VertexId>,
}

/// The `{3,q}` triangulation (`q >= 7`), explored on demand.
///
/// Layers around the origin are cycles. A vertex with `p` parents has
/// `q - 2 - p` children; its first child is shared with the previous vertex of
/// its ring, so it owns children `1..c`, and the last of those has two
/// parents. Vertex ids are assigned in discovery order.
#[derive(Debug, Clone)]
pub struct LazyTriangulation {
    q: u32,
    nodes: Vec<Node>,
    children: HashMap<(VertexId, u32), VertexId>,
}

const ORIGIN_KEY: u64 = 0x7472_6961_6e67_6c65;

impl LazyTriangulation {
    pub fn new(q: usize) -> Result<Self> {
        if q < 7 {
            return Err(Error::Parameter(format!(
                "{{3,{q}}} is not hyperbolic: need q >= 7"
            )));
        }
        let origin = Node {
            layer: 0,
            owner: 0,
            index: 0,
            parents: 0,
            key: ORIGIN_KEY,
            prev: None,
            next: None,
        };
        Ok(LazyTriangulation {
            q: q as u32,
            nodes: vec![origin],
            children: HashMap::new(),
        })
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    fn child_count(&self, v: VertexId) -> u32 {
        let n = &self.nodes[v];
        if n.layer == 0 {
            self.q
        } else {
            self.q - 2 - n.parents as u32
        }
    }

    fn child(&mut self, owner: VertexId, index: u32) -> VertexId {
        if let Some(&c) = self.children.get(&(owner, index)) {
            return c;
        }
        let layer = self.nodes[owner].layer + 1;
        let parents = if layer == 1 || index + 1 < self.child_count(owner) {
            1
        } else {
            2
        };
        let key = rng::mix(self.nodes[owner].key ^ rng::mix(u64::from(index) + 1));
        let id = self.nodes.len();
        self.nodes.push(Node {
            layer,
            owner,
            index,
            parents,
            key,
            prev: None,
            next: None,
        });
        self.children.insert((owner, index), id);
        id
    }

    fn next(&mut self, v: VertexId) -> VertexId {
        if let Some(n) = self.nodes[v].next {
            return n;
        }
        let Node {
            layer,
            owner,
            index,
            ..
        } = self.nodes[v];
        let n = if layer == 1 {
            self.child(0, (index + 1) % self.q)
        } else if index + 1 < self.child_count(owner) {
            self.child(owner, index + 1)
        } else {
            let on = self.next(owner);
            self.child(on, 1)
        };
        self.nodes[v].next = Some(n);
        self.nodes[n].prev = Some(v);
        n
    }

    fn prev(&mut self, v: VertexId) -> VertexId {
        if let Some(p) = self.nodes[v].prev {
            return p;
        }
        let Node {
            layer,
            owner,
            index,
            ..
        } = self.nodes[v];
        let p = if layer == 1 {
            self.child(0, (index + self.q - 1) % self.q)
        } else if index > 1 {
            self.child(owner, index - 1)
        } else {
            let op = self.prev(owner);
            let last = self.child_count(op) - 1;
            self.child(op, last)
        };
        self.nodes[v].prev = Some(p);
        self.nodes[p].next = Some(v);
        p
    }

    fn first_child(&mut self, v: VertexId) -> VertexId {
        let p = self.prev(v);
        let last = self.child_count(p) - 1;
        self.child(p, last)
    }
}

impl Topology for LazyTriangulation {
    fn origin(&self) -> VertexId {
        0
    }

    fn neighbors_into(&mut self, v: VertexId, out: &mut Vec<VertexId>) {
        if v == 0 {
            for i in 0..self.q {
                out.push(self.child(0, i));
            }
            return;
        }
        let owner = self.nodes[v].owner;
        out.push(owner);
        if self.nodes[v].parents == 2 {
            let second = self.next(owner);
            out.push(second);
        }
        let p = self.prev(v);
        let n = self.next(v);
        out.push(p);
        out.push(n);
        let first = self.first_child(v);
        out.push(first);
        for i in 1..self.child_count(v) {
            out.push(self.child(v, i));
        }
    }

    fn depth(&self, v: VertexId) -> usize {
        self.nodes[v].layer as usize
    }

    fn is_frontier(&self, _v: VertexId) -> bool {
        false
    }

    fn vertex_key(&self, v: VertexId) -> u64 {
        self.nodes[v].key
    }

    fn vertex_count(&self) -> usize {
        self.nodes.len()
    }
}

/// The `d`-regular tree, explored on demand. Children of a vertex are created
/// together the first time its neighbors are asked for.
#[derive(Debug, Clone)]
pub struct LazyRegularTree {
    degree: usize,
    parent: Vec<VertexId>,
    depth: Vec<u32>,
    key: Vec<u64>,
    first_child: Vec<Option<VertexId>>,
}

const TREE_ROOT_KEY: u64 = 0x7472_6565_726f_6f74;

impl LazyRegularTree {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Parameter(format!(
                "tree degree {degree} must be at least 2"
            )));
        }
        Ok(LazyRegularTree {
            degree,
            parent: vec![0],
            depth: vec![0],
            key: vec![TREE_ROOT_KEY],
            first_child: vec![None],
        })
    }

    fn children(&mut self, v: VertexId) -> std::ops::Range<VertexId> {
        let count = if v == 0 { self.degree } else { self.degree - 1 };
        let start = match self.first_child[v] {
            Some(c) => c,
            None => {
                let start = self.parent.len();
                for i in 0..count {
                    self.parent.push(v);
                    self.depth.push(self.depth[v] + 1);
                    self.key
                        .push(rng::mix(self.key[v] ^ rng::mix(i as u64 + 1)));
                    self.first_child.push(None);
                }
                self.first_child[v] = Some(start);
                start
            }
        };
        start..start + count
    }
}

impl Topology for LazyRegularTree {
    fn origin(&self) -> VertexId {
        0
    }

    fn neighbors_into(&mut self, v: VertexId, out: &mut Vec<VertexId>) {
        if v != 0 {
            out.push(self.parent[v]);
        }
        out.extend(self.children(v));
    }

    fn depth(&self, v: VertexId) -> usize {
        self.depth[v] as usize
    }

    fn is_frontier(&self, _v: VertexId) -> bool {
        false
    }

    fn vertex_key(&self, v: VertexId) -> u64 {
        self.key[v]
    }

    fn vertex_count(&self) -> usize {
        self.parent.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_tessellation;
    use std::collections::{BTreeMap, HashSet, VecDeque};

    fn explore(t: &mut LazyTriangulation, layers: usize) -> (Vec<usize>, usize) {
        let mut seen = HashSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        let mut edges = HashSet::new();
        let mut buf = Vec::new();
        while let Some(u) = queue.pop_front() {
            buf.clear();
            t.neighbors_into(u, &mut buf);
            assert_eq!(buf.len(), t.q());
            assert_eq!(buf.iter().collect::<HashSet<_>>().len(), t.q());
            for &v in &buf {
                if t.depth(v) > layers {
                    continue;
                }
                edges.insert((u.min(v), u.max(v)));
                if t.depth(v) <= layers && seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        let mut spheres = BTreeMap::new();
        for &v in &seen {
            *spheres.entry(t.depth(v)).or_insert(0usize) += 1;
        }
        let inner = edges
            .iter()
            .filter(|&&(a, b)| t.depth(a) <= layers && t.depth(b) <= layers)
            .count();
        (spheres.into_values().collect(), inner)
    }

    #[test]
    fn matches_materialized_tessellation() {
        for q in [7, 8] {
            let g = generate_tessellation(3, q, 6).unwrap();
            let d: Vec<usize> = (0..g.vertex_count()).map(|v| g.depth(v).unwrap()).collect();
            let mut spheres = vec![0; 7];
            for &x in &d {
                spheres[x] += 1;
            }
            let mut t = LazyTriangulation::new(q).unwrap();
            let (lazy_spheres, lazy_edges) = explore(&mut t, 6);
            assert_eq!(lazy_spheres, spheres, "q = {q}");
            assert_eq!(lazy_edges, g.edge_count(), "q = {q}");
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        let mut t = LazyTriangulation::new(7).unwrap();
        explore(&mut t, 5);
        let mut buf = Vec::new();
        let mut other = Vec::new();
        for v in 0..t.vertex_count() {
            if t.depth(v) >= 5 {
                continue;
            }
            buf.clear();
            t.neighbors_into(v, &mut buf);
            for &u in &buf.clone() {
                other.clear();
                t.neighbors_into(u, &mut other);
                assert!(other.contains(&v));
            }
        }
    }

    #[test]
    fn keys_do_not_depend_on_exploration_order() {
        let mut a = LazyTriangulation::new(7).unwrap();
        explore(&mut a, 4);
        let mut b = LazyTriangulation::new(7).unwrap();
        let mut buf = Vec::new();
        // walk outward along a single branch first
        let mut v = 0;
        for _ in 0..4 {
            buf.clear();
            b.neighbors_into(v, &mut buf);
            v = *buf.last().unwrap();
        }
        explore(&mut b, 4);
        let ka: HashSet<u64> = (0..a.vertex_count()).map(|v| a.vertex_key(v)).collect();
        let kb: HashSet<u64> = (0..b.vertex_count()).map(|v| b.vertex_key(v)).collect();
        let inner_a: HashSet<u64> = (0..a.vertex_count())
            .filter(|&v| a.depth(v) <= 4)
            .map(|v| a.vertex_key(v))
            .collect();
        assert!(inner_a.is_subset(&kb));
        assert_eq!(ka.len(), a.vertex_count());
    }

    #[test]
    fn lazy_tree_spheres_double() {
        let mut t = LazyRegularTree::new(3).unwrap();
        let mut frontier = vec![0usize];
        let mut buf = Vec::new();
        for k in 1..=6 {
            let mut next = Vec::new();
            for &u in &frontier {
                buf.clear();
                t.neighbors_into(u, &mut buf);
                assert_eq!(buf.len(), 3);
                next.extend(buf.iter().copied().filter(|&v| t.depth(v) == k));
            }
            assert_eq!(next.len(), 3 << (k - 1));
            frontier = next;
        }
        assert!(LazyRegularTree::new(1).is_err());
    }

    #[test]
    fn rejects_small_q() {
        assert!(LazyTriangulation::new(6).is_err());
    }
}
