use fpphe::fpp::{passage_tail_bounds, poisson_cdf, poisson_sf};
use fpphe::rng::{self, Stream};
use statrs::distribution::{DiscreteCDF, Poisson};

#[test]
fn exact_values_match_statrs() {
    for l in 1..=30u32 {
        for s in [0.3, 1.0, 2.5, 7.0, 15.0, 40.0] {
            let p = Poisson::new(s).unwrap();
            let cdf = p.cdf(l as u64);
            assert!((poisson_cdf(l, s) - cdf).abs() < 1e-12, "cdf l={l} s={s}");
            let sf = 1.0 - p.cdf(l as u64 - 1);
            assert!((poisson_sf(l, s) - sf).abs() < 1e-12, "sf l={l} s={s}");
        }
    }
}

#[test]
fn exact_tails_respect_the_bounds() {
    for l in 2..=16u32 {
        let low = passage_tail_bounds(l, l as f64 / 2.0).unwrap();
        assert!(low.exact_low <= low.bound_low.unwrap());
        let high = passage_tail_bounds(l, 2.0 * l as f64).unwrap();
        assert!(high.exact_high <= high.bound_high.unwrap());
        assert!(high.exact_at_least <= high.exact_high);
    }
    assert!(passage_tail_bounds(0, 1.0).is_err());
    assert!(passage_tail_bounds(3, 0.0).is_err());
}

#[test]
fn monte_carlo_agrees_with_poisson() {
    let samples = 100_000u64;
    for (l, s) in [(4u32, 2.0), (8, 4.0), (6, 12.0)] {
        let mut hits = 0u64;
        for i in 0..samples {
            let t: f64 = (0..l as u64)
                .map(|k| rng::exp1(31, Stream::Sampling, i * 64 + k))
                .sum();
            hits += (t <= s) as u64;
        }
        let p = passage_tail_bounds(l, s).unwrap().exact_low;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        let est = hits as f64 / samples as f64;
        assert!((est - p).abs() <= 3.0 * se, "ℓ={l} S={s}: {est} vs {p}");
    }
}
