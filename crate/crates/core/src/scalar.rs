//! Numeric scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the filter can be instantiated over (`f32` or `f64`).
///
/// `Display` must print the shortest decimal that parses back to the same
/// value, which holds for both primitive float types; the text formats rely
/// on it for bit-exact round trips.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal, panicking only for values the type cannot hold.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }

    fn from_count(count: usize) -> Self {
        Self::from_usize(count).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Parses a scalar written by `Display`, mapping failures to `None`.
pub fn parse_scalar<F: Scalar>(text: &str) -> Option<F> {
    text.trim().parse::<F>().ok()
}

/// Orders two scalars; NaN compares equal to everything, which never arises
/// for the finite weights produced in this crate.
pub fn cmp_scalar<F: Scalar>(a: F, b: F) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips() {
        for v in [0.1_f64, 1.0 / 3.0, 1e-300, 123456.789, -0.0] {
            let back: f64 = parse_scalar(&v.to_string()).unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
        let v = 0.1_f32 + 0.2_f32;
        let back: f32 = parse_scalar(&v.to_string()).unwrap();
        assert_eq!(back.to_bits(), v.to_bits());
    }
}
