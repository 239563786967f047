//! Quadratic residue symbols and the characters built from them.

mod characters;
mod jacobi;
mod qr;
mod quartic;

pub use characters::{
    chi2, chi_t, chi_t_congruence, chi_w, conj_embedding_positive, gamma, is_square_mod_t5, mu, psi_w, Gamma,
};
pub use jacobi::{jacobi, jacobi_u64};
pub use qr::{qr_symbol, PrimeIdeal, QrModulus};
pub use quartic::{quartic_2_p, quartic_2_p_enumerate, quartic_pq_2};

use std::fmt;
use std::ops::{Mul, MulAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A symbol value in `{−1, 0, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolValue(i8);

impl SymbolValue {
    pub const ONE: SymbolValue = SymbolValue(1);
    pub const ZERO: SymbolValue = SymbolValue(0);
    pub const MINUS_ONE: SymbolValue = SymbolValue(-1);

    pub fn new(v: i64) -> Self {
        assert!((-1..=1).contains(&v), "symbol value out of range: {v}");
        SymbolValue(v as i8)
    }

    pub fn from_bool(square: bool) -> Self {
        if square {
            Self::ONE
        } else {
            Self::MINUS_ONE
        }
    }

    pub fn value(self) -> i64 {
        self.0 as i64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, e: u32) -> Self {
        if e == 0 {
            Self::ONE
        } else if e.is_multiple_of(2) {
            SymbolValue(self.0 * self.0)
        } else {
            self
        }
    }
}

impl Mul for SymbolValue {
    type Output = SymbolValue;
    fn mul(self, o: SymbolValue) -> SymbolValue {
        SymbolValue(self.0 * o.0)
    }
}

impl MulAssign for SymbolValue {
    fn mul_assign(&mut self, o: SymbolValue) {
        self.0 *= o.0;
    }
}

impl std::iter::Product for SymbolValue {
    fn product<I: Iterator<Item = SymbolValue>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("modulus is not odd")]
    EvenModulus,
    #[error("argument is not odd")]
    EvenArgument,
    #[error("first argument is not odd")]
    EvenFirstArgument,
    #[error("{0} ramifies")]
    RamifiedPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("norm of w must be a prime congruent to 1 mod 8")]
    BadCharacterModulus,
    #[error("(z) is not coprime to the conductor")]
    BadConductor,
    #[error("coordinates exceed the 64-bit range")]
    Overflow,
}
