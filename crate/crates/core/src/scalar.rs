//! Numeric abstraction for the derived metrics.
//!
//! Report math and the slot model's ratios are generic so the same code runs on
//! `f64` for measured data and on exact rationals for golden fixtures.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display {
    /// `n / d` for small integer counts.
    fn ratio(n: u64, d: u64) -> Self {
        Self::from_u64(n).expect("count fits the scalar")
            / Self::from_u64(d).expect("count fits the scalar")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Ratio<i64> {}
impl Scalar for Ratio<i128> {}

/// Arithmetic mean; `None` for an empty sequence.
pub fn mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut sum = T::zero();
    let mut n = 0usize;
    for v in values {
        sum = sum + v;
        n += 1;
    }
    (n > 0).then(|| sum / T::from_count(n))
}

pub fn max<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<T> {
    values.into_iter().fold(None, |acc, v| match acc {
        Some(m) if m >= v => Some(m),
        _ => Some(v),
    })
}
