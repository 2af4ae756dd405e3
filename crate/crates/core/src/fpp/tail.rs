use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact tails of a sum of `ℓ` i.i.d. mean-one exponentials and their
/// closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub length: u32,
    pub s: f64,
    /// `P[T(P) <= S] = P[Poisson(S) >= ℓ]`.
    pub exact_low: f64,
    /// `2 e^{-S} S^ℓ / ℓ!`, applicable when `ℓ >= 2S`.
    pub bound_low: Option<f64>,
    /// `P[Poisson(S) <= ℓ]`.
    pub exact_high: f64,
    /// `P[T(P) >= S] = P[Poisson(S) <= ℓ - 1]`.
    pub exact_at_least: f64,
    /// `ℓ (Se/ℓ)^ℓ e^{-S}`, applicable when `ℓ <= S`.
    pub bound_high: Option<f64>,
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

fn poisson_ln_pmf(k: u32, s: f64) -> f64 {
    -s + k as f64 * s.ln() - ln_factorial(k)
}

/// `P[Poisson(s) <= k]`.
pub fn poisson_cdf(k: u32, s: f64) -> f64 {
    if k as f64 >= s {
        1.0 - poisson_sf(k + 1, s)
    } else {
        (0..=k)
            .map(|i| poisson_ln_pmf(i, s).exp())
            .sum::<f64>()
            .min(1.0)
    }
}

/// `P[Poisson(s) >= k]`.
pub fn poisson_sf(k: u32, s: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if (k as f64) <= s {
        return 1.0 - poisson_cdf(k - 1, s);
    }
    // terms decrease geometrically beyond the mode
    let mut total = 0.0;
    let mut i = k;
    loop {
        let term = poisson_ln_pmf(i, s).exp();
        total += term;
        if term < total * 1e-17 || i > k + 10_000 {
            break;
        }
        i += 1;
    }
    total.min(1.0)
}

pub fn passage_tail_bounds(length: u32, s: f64) -> Result<TailBounds> {
    if length == 0 || !(s > 0.0) || !s.is_finite() {
        return Err(Error::Argument(format!(
            "need ℓ >= 1 and S > 0, got ℓ={length}, S={s}"
        )));
    }
    let l = length as f64;
    let exact_low = poisson_sf(length, s);
    let exact_high = poisson_cdf(length, s);
    let exact_at_least = poisson_cdf(length - 1, s);
    let bound_low = (l >= 2.0 * s).then(|| 2.0 * poisson_ln_pmf(length, s).exp());
    let bound_high = (l <= s).then(|| l * (l * (s * std::f64::consts::E / l).ln() - s).exp());
    if bound_low.is_some_and(|b| exact_low > b) || bound_high.is_some_and(|b| exact_high > b) {
        return Err(Error::Consistency(format!(
            "tail bound violated at ℓ={length}, S={s}"
        )));
    }
    Ok(TailBounds {
        length,
        s,
        exact_low,
        bound_low,
        exact_high,
        exact_at_least,
        bound_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let b = passage_tail_bounds(1, 1.0).unwrap();
        assert!((b.exact_low - (1.0 - (-1f64).exp())).abs() < 1e-12);
        let b = passage_tail_bounds(4, 2.0).unwrap();
        assert!((b.exact_low - 0.142_876_5).abs() < 1e-6);
        assert!((b.bound_low.unwrap() - 0.180_447).abs() < 1e-5);
        let b = passage_tail_bounds(2, 4.0).unwrap();
        assert!((b.exact_high - 0.238_103).abs() < 1e-5);
        assert!(b.exact_high <= b.bound_high.unwrap());
        assert!((b.exact_at_least - 5.0 * (-4f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn bounds_outside_range_are_absent() {
        let b = passage_tail_bounds(3, 2.0).unwrap();
        assert!(b.bound_low.is_none() && b.bound_high.is_none());
        assert!(passage_tail_bounds(0, 1.0).is_err());
        assert!(passage_tail_bounds(2, 0.0).is_err());
    }

    #[test]
    fn cdf_and_sf_are_complementary() {
        for k in 1..30 {
            for s in [0.3, 2.0, 9.5, 40.0] {
                let sum = poisson_cdf(k - 1, s) + poisson_sf(k, s);
                assert!((sum - 1.0).abs() < 1e-12, "k={k} s={s}");
            }
        }
    }
}
