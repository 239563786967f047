//! Exact arithmetic for the 2-power ranks of narrow class groups of
//! `Q(√(dpq))`, `d ∈ {−4, 8}`.

pub mod arith;
pub mod census;
pub mod charsum;
pub mod classgroup;
pub mod criteria;
pub mod quadring;
pub mod scalar;
pub mod sieve;
pub mod symbols;
pub mod verify;

pub use quadring::{QuadError, QuadInt, RingTag};
pub use scalar::RingScalar;

/// Ring element with machine-word coordinates.
pub type Elem = QuadInt<i64>;
/// Ring element with 128-bit coordinates.
pub type WideElem = QuadInt<i128>;
/// Ring element with arbitrary-precision coordinates.
pub type BigElem = QuadInt<num_bigint::BigInt>;
/// Exact rational used for weights and ratios.
pub type Rational = num_rational::Ratio<i64>;
