//! Arithmetic in the Euclidean rings Z[i] and Z[√2].
//!
//! An element `a + b√d₀` is stored as its two integer coordinates together
//! with the ring it lives in. Ideals are always handled through a generator.

mod element;
mod normalize;
mod residue;
mod split;

pub use element::QuadInt;
pub use normalize::{in_domain, in_square_class, normalize_generator, Convention, NormalizedGenerator};
pub use residue::ResidueRing;
pub use split::split_prime;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One of the two rings of integers `Z[√d₀]` with `d = 4·d₀ ∈ {−4, 8}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingTag {
    /// Z[i], d = −4.
    Gaussian,
    /// Z[√2], d = 8.
    Sqrt2,
}

impl RingTag {
    pub const ALL: [RingTag; 2] = [RingTag::Gaussian, RingTag::Sqrt2];

    pub fn from_d(d: i64) -> Result<Self, QuadError> {
        match d {
            -4 => Ok(RingTag::Gaussian),
            8 => Ok(RingTag::Sqrt2),
            _ => Err(QuadError::BadDiscriminant(d)),
        }
    }

    pub fn d(self) -> i64 {
        4 * self.d0()
    }

    pub fn d0(self) -> i64 {
        match self {
            RingTag::Gaussian => -1,
            RingTag::Sqrt2 => 2,
        }
    }

    /// Whether the odd prime `p` splits into two degree-one primes.
    pub fn splits(self, p: u64) -> bool {
        match self {
            RingTag::Gaussian => p % 4 == 1,
            RingTag::Sqrt2 => p % 8 == 1 || p % 8 == 7,
        }
    }
}

impl std::fmt::Display for RingTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.d())
    }
}

impl Serialize for RingTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.d())
    }
}

impl<'de> Deserialize<'de> for RingTag {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let d = i64::deserialize(de)?;
        RingTag::from_d(d).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("d must be -4 or 8, got {0}")]
    BadDiscriminant(i64),
    #[error("{p} does not split in Z[sqrt({d0})]")]
    NotSplit { p: u64, d0: i64 },
    #[error("element has even norm")]
    NotOdd,
    #[error("element has non-positive norm")]
    NotTotallyPositive,
    #[error("no unit multiple is a square modulo 4")]
    NoSquareClass,
    #[error("coordinates exceed the 64-bit range")]
    Overflow,
    #[error("residue system of size {0} is too large to materialize")]
    BoundExceeded(u128),
}
