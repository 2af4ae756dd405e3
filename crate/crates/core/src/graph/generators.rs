use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use super::{Family, Graph, VertexId};
use crate::error::{Error, Result};

/// Largest vertex count any generator will materialize.
pub const MAX_VERTICES: usize = 20_000_000;

fn size_error(what: &str, n: u128) -> Error {
    Error::Size(format!(
        "{what} would need {n} vertices (budget {MAX_VERTICES})"
    ))
}

/// Rooted tree: the root and every internal vertex have `branching` children.
pub fn generate_regular_tree(branching: usize, depth: usize) -> Result<Graph> {
    if branching < 2 {
        return Err(Error::Parameter(format!("branching {branching} < 2")));
    }
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=depth {
        total += level;
        if total > MAX_VERTICES as u128 {
            return Err(size_error("regular tree", total));
        }
        level *= branching as u128;
    }
    let n = total as usize;
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    // BFS numbering: children of v are b*v+1 ..= b*v+b
    for v in 0..n {
        for c in 1..=branching {
            let child = branching * v + c;
            if child >= n {
                break;
            }
            adj[v].push(child);
            adj[child].push(v);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let frontier = (0..n)
        .map(|v| {
            let full = if v == 0 { branching } else { branching + 1 };
            adj[v].len() < full
        })
        .collect();
    Ok(Graph::from_sorted_adjacency(
        adj,
        0,
        Family::RegularTree { branching, depth },
        frontier,
    ))
}

/// Box `{-radius..radius}^dim` with nearest-neighbor edges.
pub fn generate_lattice(dim: usize, radius: usize) -> Result<Graph> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Parameter(format!(
            "lattice dimension {dim} not in 1..=3"
        )));
    }
    let side = 2 * radius as u128 + 1;
    let total = side.pow(dim as u32);
    if total > MAX_VERTICES as u128 {
        return Err(size_error("lattice box", total));
    }
    let side = side as usize;
    let n = total as usize;
    let r = radius as i64;
    let index = |c: &[i64]| -> usize {
        c.iter()
            .rev()
            .fold(0usize, |acc, &x| acc * side + (x + r) as usize)
    };
    let mut id = vec![usize::MAX; n];
    let mut coords: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let center = vec![0i64; dim];
    id[index(&center)] = 0;
    coords.push(center.clone());
    queue.push_back(center);
    let mut adj: Vec<Vec<VertexId>> = Vec::with_capacity(n);
    adj.push(Vec::new());
    while let Some(c) = queue.pop_front() {
        let u = id[index(&c)];
        for axis in 0..dim {
            for step in [1i64, -1] {
                let mut d = c.clone();
                d[axis] += step;
                if d[axis].abs() > r {
                    continue;
                }
                let slot = index(&d);
                if id[slot] == usize::MAX {
                    id[slot] = coords.len();
                    coords.push(d.clone());
                    adj.push(Vec::new());
                    queue.push_back(d);
                }
                adj[u].push(id[slot]);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let frontier = coords
        .iter()
        .map(|c| c.iter().any(|x| x.abs() == r))
        .collect();
    let layout = (dim <= 2).then(|| {
        coords
            .iter()
            .map(|c| [c[0] as f64, c.get(1).copied().unwrap_or(0) as f64])
            .collect()
    });
    let g = Graph::from_sorted_adjacency(adj, 0, Family::Lattice { dim, radius }, frontier);
    match layout {
        Some(l) => g.with_layout(l),
        None => Ok(g),
    }
}

/// Cayley ball of the free product of cyclic groups.
///
/// Elements are alternating-syllable normal forms `(factor, exponent)`; the
/// radius counts syllables, so each factor coset is a complete graph.
pub fn generate_free_product(factors: &[usize], radius: usize) -> Result<Graph> {
    if let Some(&bad) = factors.iter().find(|&&s| s < 2) {
        return Err(Error::Parameter(format!("factor size {bad} < 2")));
    }
    let generators: usize = factors.iter().map(|s| s - 1).sum();
    if generators < 2 {
        return Err(Error::Parameter(format!(
            "free product {factors:?} has {generators} generator(s), need at least 2"
        )));
    }
    type Word = Vec<(u8, u32)>;
    let mut ids: HashMap<Word, VertexId> = HashMap::new();
    let mut words: Vec<Word> = vec![Vec::new()];
    ids.insert(Vec::new(), 0);
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut head = 0;
    while head < words.len() {
        let w = words[head].clone();
        let u = head;
        head += 1;
        for (f, &size) in factors.iter().enumerate() {
            let f8 = f as u8;
            for k in 1..size as u32 {
                let mut next = w.clone();
                match next.last_mut() {
                    Some(last) if last.0 == f8 => {
                        last.1 = (last.1 + k) % size as u32;
                        if last.1 == 0 {
                            next.pop();
                        }
                    }
                    _ => next.push((f8, k)),
                }
                if next.len() > radius {
                    continue;
                }
                let v = match ids.get(&next) {
                    Some(&v) => v,
                    None => {
                        let v = words.len();
                        if v >= MAX_VERTICES {
                            return Err(size_error("free product ball", v as u128 + 1));
                        }
                        ids.insert(next.clone(), v);
                        words.push(next);
                        adj.push(Vec::new());
                        v
                    }
                };
                adj[u].push(v);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let frontier = adj.iter().map(|l| l.len() < generators).collect();
    Ok(Graph::from_sorted_adjacency(
        adj,
        0,
        Family::FreeProduct {
            factors: factors.to_vec(),
            radius,
        },
        frontier,
    ))
}

/// The 3-regular tree `ℤ₂ ∗ ℤ₂ ∗ ℤ₂` truncated at `radius`.
pub fn three_regular_tree(radius: usize) -> Result<Graph> {
    generate_free_product(&[2, 2, 2], radius)
}

/// Hyperbolic length of an edge of the `{p,q}` tessellation.
pub fn tessellation_edge_length(p: usize, q: usize) -> f64 {
    let c = (PI / p as f64).cos() / (PI / q as f64).sin();
    2.0 * c.acosh()
}

type Mat = [[f64; 3]; 3];

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn rot(theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn boost(len: f64) -> Mat {
    let (ch, sh) = (len.cosh(), len.sinh());
    [[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]]
}

/// Ball of combinatorial radius `layers` in the `{p,q}` tessellation.
///
/// Vertices are points of the hyperboloid model carried with an orthonormal
/// frame; the neighbors of a vertex are obtained by rotating its frame by
/// multiples of `2π/q` and translating one edge length. Coincident points are
/// merged through a spatial hash whose cell is half the minimal vertex
/// separation.
pub fn generate_tessellation(p: usize, q: usize, layers: usize) -> Result<Graph> {
    if p < 3 || q < 3 || (p - 2) * (q - 2) <= 4 {
        return Err(Error::Parameter(format!(
            "{{{p},{q}}} is not hyperbolic: need (p-2)(q-2) > 4"
        )));
    }
    let len = tessellation_edge_length(p, q);
    let sep = (2.0 * (len.cosh() - 1.0)).sqrt();
    let cell = sep / 2.0;
    let step = mul(&boost(len), &rot(PI));
    let turns: Vec<Mat> = (0..q)
        .map(|k| rot(2.0 * PI * k as f64 / q as f64))
        .collect();

    let mut frames: Vec<Mat> = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]];
    let mut depth: Vec<usize> = vec![0];
    let mut grid: HashMap<(i64, i64), Vec<VertexId>> = HashMap::new();
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    grid.entry(key(0.0, 0.0)).or_default().push(0);
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut head = 0;
    while head < frames.len() {
        let u = head;
        head += 1;
        let frame = frames[u];
        for turn in &turns {
            let nf = mul(&mul(&frame, turn), &step);
            let (x, y) = (nf[0][2], nf[1][2]);
            let (gx, gy) = key(x, y);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(gx + dx, gy + dy)) {
                        for &v in list {
                            let f = &frames[v];
                            if (f[0][2] - x).hypot(f[1][2] - y) < cell {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let v = match found {
                Some(v) => v,
                None if depth[u] < layers => {
                    let v = frames.len();
                    if v >= MAX_VERTICES {
                        return Err(Error::Size(format!(
                            "tessellation ball needs more than {MAX_VERTICES} vertices"
                        )));
                    }
                    frames.push(nf);
                    depth.push(depth[u] + 1);
                    adj.push(Vec::new());
                    grid.entry((gx, gy)).or_default().push(v);
                    v
                }
                None => continue,
            };
            if !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let frontier = adj.iter().map(|l| l.len() < q).collect();
    let layout = frames
        .iter()
        .map(|f| {
            let z = f[2][2];
            [f[0][2] / (1.0 + z), f[1][2] / (1.0 + z)]
        })
        .collect();
    Graph::from_sorted_adjacency(adj, 0, Family::Tessellation { p, q, layers }, frontier)
        .with_layout(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_distances, VertexSet};

    fn sphere_sizes(g: &Graph) -> Vec<usize> {
        let d = bfs_distances(g, &VertexSet::from_iter_in(g.vertex_count(), [g.origin()])).unwrap();
        let m = d.max_finite().unwrap();
        (0..=m).map(|k| d.sphere(k).len()).collect()
    }

    #[test]
    fn regular_tree_counts() {
        let g = generate_regular_tree(3, 0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        assert_eq!(generate_regular_tree(3, 2).unwrap().vertex_count(), 13);
        let g = generate_regular_tree(2, 10).unwrap();
        let sizes = super::super::growth_profile(&g, 0, 10).unwrap().sizes;
        assert_eq!(
            sizes,
            (0..=10)
                .map(|k| (1usize << (k + 1)) - 1)
                .collect::<Vec<_>>()
        );
        assert_eq!(
            sphere_sizes(&g),
            (0..=10).map(|k| 1usize << k).collect::<Vec<_>>()
        );
        assert!(generate_regular_tree(1, 3).is_err());
        assert!(matches!(generate_regular_tree(2, 40), Err(Error::Size(_))));
    }

    #[test]
    fn lattice_shapes() {
        let g = generate_lattice(1, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 4));
        let g = generate_lattice(2, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
        let g = generate_lattice(2, 50).unwrap();
        let d = bfs_distances(&g, &VertexSet::from_iter_in(g.vertex_count(), [0])).unwrap();
        let mut ball = 0;
        for k in 0..=50 {
            ball += d.sphere(k).len();
            assert_eq!(ball, 2 * k * k + 2 * k + 1);
        }
        assert_eq!(generate_lattice(3, 2).unwrap().vertex_count(), 125);
        assert!(generate_lattice(4, 1).is_err());
    }

    #[test]
    fn free_product_shapes() {
        let g = generate_free_product(&[2, 2], 3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (7, 6));
        assert_eq!(g.max_degree(), 2);
        let g = three_regular_tree(2).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(
            sphere_sizes(&three_regular_tree(6).unwrap()),
            vec![1, 3, 6, 12, 24, 48, 96]
        );
        assert!(generate_free_product(&[2], 3).is_err());
        assert!(generate_free_product(&[1, 3], 3).is_err());
    }

    #[test]
    fn tessellation_basics() {
        assert_eq!(generate_tessellation(3, 7, 0).unwrap().vertex_count(), 1);
        let g = generate_tessellation(3, 7, 2).unwrap();
        for v in 0..g.vertex_count() {
            if g.depth(v).unwrap() <= 1 {
                assert_eq!(g.degree(v), 7);
            }
        }
        assert!(generate_tessellation(4, 4, 2).is_err());
        assert!(generate_tessellation(3, 6, 2).is_err());
        assert_eq!(
            sphere_sizes(&generate_tessellation(3, 7, 5).unwrap()),
            vec![1, 7, 21, 56, 147, 385]
        );
    }
}
