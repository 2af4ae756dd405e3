use fpphe::geometry::*;
use fpphe::graph::{bfs_distances, generate_lattice, generate_tessellation, three_regular_tree};
use fpphe::VertexSet;
use proptest::prelude::*;

#[test]
fn geodesics_are_shortest() {
    for g in [
        generate_lattice(2, 5).unwrap(),
        generate_tessellation(3, 7, 4).unwrap(),
        three_regular_tree(5).unwrap(),
    ] {
        let n = g.vertex_count();
        for (a, b) in [(0, n - 1), (3, n / 2), (n / 3, 2 * n / 3)] {
            let d = g.distance(a, b).unwrap();
            let set = enumerate_geodesics(&g, a, b, 500).unwrap();
            assert_eq!(set.length, d);
            for p in &set.paths {
                assert_eq!(p.len(), d + 1);
                assert!(p.windows(2).all(|e| g.has_edge(e[0], e[1])));
            }
            assert_eq!(canonical_geodesic(&g, a, b).unwrap().len(), d + 1);
            let cyl = build_cylinder(&g, a, b, 0).unwrap();
            assert_eq!(cyl.members.to_vec(), set.dag_vertices);
        }
    }
}

#[test]
fn trees_are_zero_thin_for_any_budget() {
    let g = three_regular_tree(5).unwrap();
    for samples in [1, 10, 200, 5000] {
        assert_eq!(delta_thin_estimate(&g, samples, 3).unwrap().delta, 0.0);
    }
}

#[test]
fn lattice_thinness_grows_with_the_box() {
    let est: Vec<f64> = [5, 10, 15]
        .iter()
        .map(|&r| {
            delta_thin_estimate(&generate_lattice(2, r).unwrap(), 3000, 1)
                .unwrap()
                .delta
        })
        .collect();
    assert!(est[0] < est[1] && est[1] < est[2], "{est:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn detours_are_monotone(a in 0usize..400, b in 0usize..400, m in 0usize..400) {
        let g = generate_tessellation(3, 7, 5).unwrap();
        let n = g.vertex_count();
        let (a, b, m) = (a % n, b % n, m % n);
        let empty = VertexSet::empty(n);
        prop_assert_eq!(detour_length(&g, a, b, &empty).unwrap(), g.distance(a, b));
        let mut last = g.distance(a, b);
        for r in 0..3 {
            let ball = g.ball(m, r);
            if ball.contains(a) || ball.contains(b) {
                break;
            }
            let d = detour_length(&g, a, b, &ball).unwrap();
            let ok = match (d, last) {
                (None, _) => true,
                (Some(x), Some(y)) => x >= y,
                (Some(_), None) => false,
            };
            prop_assert!(ok);
            last = d;
        }
    }
}

#[test]
fn embedding_distortion_rechecks() {
    let g = generate_tessellation(3, 7, 11).unwrap();
    let emb = embed_binary_tree(&g, 2, 3, &EmbedConfig::default()).unwrap();
    for a in 1..=emb.size() {
        let d = bfs_distances(
            &g,
            &VertexSet::from_iter_in(g.vertex_count(), [emb.image(a)]),
        )
        .unwrap();
        for b in a + 1..=emb.size() {
            let dt = EmbeddedTree::tree_distance(a, b) as f64 * emb.r as f64;
            let dg = d.get(emb.image(b)).unwrap() as f64;
            assert!(dg >= dt / emb.alpha - 1e-9 && dg <= emb.alpha * dt + 1e-9);
        }
    }
}

#[test]
fn escape_ray_moves_outward() {
    let g = generate_lattice(1, 2000).unwrap();
    let occ = g.ball(g.origin(), 3);
    let ray = build_escape_ray(&g, &occ, 2, 3, 0.0).unwrap();
    let depths: Vec<usize> = (0..=ray.steps_completed())
        .map(|k| g.depth(ray.waypoint(k)).unwrap())
        .collect();
    assert!(depths.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(ray.radii, vec![step_radius(2, 1, 0.0).unwrap(), 24, 96]);
    let h = generate_tessellation(3, 7, 9).unwrap();
    let occ = h.ball(h.origin(), 1);
    let ray = build_escape_ray(&h, &occ, 2, 1, 0.5).unwrap();
    let d: Vec<usize> = (0..=ray.steps_completed())
        .map(|k| h.depth(ray.waypoint(k)).unwrap())
        .collect();
    assert!(d.windows(2).all(|w| w[0] < w[1]));
}
