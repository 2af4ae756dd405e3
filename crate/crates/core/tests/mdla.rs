use fpphe::graph::{generate_lattice, Graph};
use fpphe::mdla::*;
use fpphe::reference::naive_mdla;
use proptest::prelude::*;

fn aggregate_connected(g: &Graph, sites: &[Site]) -> bool {
    let mut seen = vec![false; sites.len()];
    let mut stack = vec![g.origin()];
    seen[g.origin()] = true;
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if !seen[v] && sites[v] == Site::Aggregate {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    (0..sites.len()).all(|v| sites[v] != Site::Aggregate || seen[v])
}

#[test]
fn heap_scheduler_matches_linear_scan() {
    for (dim, radius) in [(1, 40), (2, 8), (3, 3)] {
        let g = generate_lattice(dim, radius).unwrap();
        for seed in 0..6 {
            let sites = initial_sites(&g, 0.4, seed);
            for stop in [MdlaStop::Time(30.0f64), MdlaStop::AggregateCap(12)] {
                let fast = run_mdla_from(&g, sites.clone(), 0.4, seed, stop).unwrap();
                let (slow_sites, slow_pos, slow_time) = naive_mdla(&g, sites.clone(), seed, stop);
                assert_eq!(fast.sites, slow_sites, "dim {dim} seed {seed}");
                assert_eq!(fast.positions, slow_pos);
                assert_eq!(fast.time.to_bits(), slow_time.to_bits());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exclusion_conservation_connectivity(seed in any::<u64>(), rho in 0.05f64..0.9, horizon in 1.0f64..60.0) {
        let g = generate_lattice(2, 7).unwrap();
        let st = run_mdla(&g, rho, seed, MdlaStop::Time(horizon)).unwrap();
        let initial = initial_sites(&g, rho, seed);
        let before = initial.iter().filter(|&&s| s != Site::Empty).count();
        let after = st.sites.iter().filter(|&&s| s != Site::Empty).count();
        prop_assert_eq!(before, after);
        let mut occupied = vec![0usize; g.vertex_count()];
        for (p, &x) in st.positions.iter().enumerate() {
            occupied[x] += 1;
            let expected = if st.frozen[p] { Site::Aggregate } else { Site::Particle };
            prop_assert_eq!(st.sites[x], expected);
        }
        prop_assert!(occupied.iter().all(|&c| c <= 1));
        prop_assert!(aggregate_connected(&g, &st.sites));
        prop_assert!(st.growth.windows(2).all(|w| w[0].time <= w[1].time && w[0].size < w[1].size && w[0].radius <= w[1].radius));
        prop_assert_eq!(st.growth.last().unwrap().size, st.aggregate_size());
    }
}

#[test]
fn single_precision_runs() {
    let g = generate_lattice(2, 6).unwrap();
    let st = run_mdla(&g, 0.5, 3, MdlaStop::Time(20.0f32)).unwrap();
    assert!(aggregate_connected(&g, &st.sites));
    assert!(run_mdla(&g, 1.0, 3, MdlaStop::Time(1.0f64)).is_err());
}
