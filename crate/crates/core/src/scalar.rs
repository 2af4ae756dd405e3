//! Scalar abstractions.
//!
//! Simulation code (passage times, occupation times, Monte Carlo
//! frequencies) is generic over [`Real`], implemented for `f32` and `f64`.
//! Closed-form parameter arithmetic (the multi-scale constants) is generic
//! over [`Exact`], which additionally admits exact rationals.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used for times and probabilities.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts")
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Total order for non-NaN values; NaN sorts last.
    fn total_cmp_real(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).unwrap_or_else(|| {
            if self.is_nan() {
                if other.is_nan() {
                    std::cmp::Ordering::Equal
                } else {
                    std::cmp::Ordering::Greater
                }
            } else {
                std::cmp::Ordering::Less
            }
        })
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field-like scalar with a ceiling, used for closed-form constants.
///
/// Floats evaluate the formulas in floating point; `Ratio<i64>` evaluates
/// them exactly.
pub trait Exact:
    Num + Signed + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn ratio(numer: i64, denom: i64) -> Self;
    fn ceil_to_i64(&self) -> i64;

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Exact for f64 {
    fn ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
    fn ceil_to_i64(&self) -> i64 {
        self.ceil() as i64
    }
}

impl Exact for f32 {
    fn ratio(numer: i64, denom: i64) -> Self {
        numer as f32 / denom as f32
    }
    fn ceil_to_i64(&self) -> i64 {
        self.ceil() as i64
    }
}

impl Exact for Ratio<i64> {
    fn ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }
    fn ceil_to_i64(&self) -> i64 {
        self.ceil().to_integer()
    }
}

impl Exact for Ratio<i128> {
    fn ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer as i128, denom as i128)
    }
    fn ceil_to_i64(&self) -> i64 {
        self.ceil().to_integer() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ceiling_is_exact() {
        let x = Ratio::<i64>::ratio(10, 3);
        assert_eq!(x.ceil_to_i64(), 4);
        let y = Ratio::<i64>::ratio(12, 3);
        assert_eq!(y.ceil_to_i64(), 4);
        assert_eq!(Exact::ceil_to_i64(&4.0f64), 4);
    }

    #[test]
    fn total_order_puts_nan_last() {
        use std::cmp::Ordering;
        assert_eq!(1.0f64.total_cmp_real(&f64::NAN), Ordering::Less);
        assert_eq!(f32::NAN.total_cmp_real(&0.0), Ordering::Greater);
    }
}
