//! The integer scalar behind ring elements.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer usable as a coordinate of a quadratic integer.
///
/// Implemented for `i64`, `i128` and `BigInt`; fixed-width scalars are
/// promoted through `BigInt` when a product would overflow.
pub trait RingScalar:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + FromPrimitive
    + ToPrimitive
    + ToBigInt
    + TryFrom<BigInt>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("i64 fits every scalar")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Rounds `n / d` to the nearest integer (ties upward); requires `d > 0`.
    fn div_round(n: &Self, d: &Self) -> Self {
        let two = Self::two();
        (two.clone() * n.clone() + d.clone()).div_floor(&(two * d.clone()))
    }
}

impl<T> RingScalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + FromPrimitive
        + ToPrimitive
        + ToBigInt
        + TryFrom<BigInt>
        + Send
        + Sync
{
}
