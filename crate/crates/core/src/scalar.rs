//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for money, shares, QoS values and network weights: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant. Never fails for finite inputs.
    #[inline]
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 constant")
    }

    #[inline]
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("usize fits in a float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sum in slice order. Reductions always go through here so results are reproducible.
pub fn ordered_sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc + v)
}

pub fn mean<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    ordered_sum(values) / T::of_usize(values.len())
}

/// Population standard deviation (divides by `n`).
pub fn population_std<T: Scalar>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let mu = mean(values);
    let var = values
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - mu) * (v - mu))
        / T::of_usize(values.len());
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_of_singleton_is_zero() {
        assert_eq!(population_std(&[4.0_f64]), 0.0);
    }

    #[test]
    fn std_matches_hand_value() {
        // values 0 and 20: mean 10, deviations ±10
        assert!((population_std(&[0.0_f64, 20.0]) - 10.0).abs() < 1e-12);
        assert!((population_std(&[2.0_f32, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]) - 2.0).abs() < 1e-6);
    }
}
