use serde::{Deserialize, Serialize};

use super::{QuadError, QuadInt, RingTag};
use crate::scalar::RingScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// Z[i]: `a` odd and `a + b ≡ 1 (mod 4)`.
    PrimaryZi,
    /// Z[√2], positive norm: `value` or `−value` in the sector
    /// `{u > 0, −u < 2v ≤ u}`.
    FundamentalDomainZsqrt2,
    /// Congruent to an odd square modulo 4.
    SquareClassMod4,
}

/// A generator together with the unit that produced it:
/// `value = (−1)^negated · u^unit_exponent · input`, where `u` is `i` in Z[i],
/// and `(1+√2)²` (fundamental domain) or `1+√2` (square class) in Z[√2].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedGenerator<T> {
    pub value: QuadInt<T>,
    pub unit_exponent: i64,
    pub negated: bool,
    pub convention: Convention,
}

pub fn normalize_generator<T: RingScalar>(
    w: &QuadInt<T>,
    convention: Convention,
) -> Result<NormalizedGenerator<T>, QuadError> {
    if !w.is_odd() {
        return Err(QuadError::NotOdd);
    }
    match convention {
        Convention::PrimaryZi => primary(w),
        Convention::FundamentalDomainZsqrt2 => {
            if w.norm() <= T::zero() {
                return Err(QuadError::NotTotallyPositive);
            }
            let neg = w.a.is_negative();
            let pos = if neg { -w } else { w.clone() };
            let (v, k) = reduce_to_domain(&pos);
            Ok(NormalizedGenerator {
                value: if neg { -v } else { v },
                unit_exponent: k,
                negated: false,
                convention,
            })
        }
        Convention::SquareClassMod4 => square_class(w),
    }
}

fn primary<T: RingScalar>(w: &QuadInt<T>) -> Result<NormalizedGenerator<T>, QuadError> {
    let four = <T as RingScalar>::from_i64(4);
    let mut v = w.clone();
    for k in 0..4 {
        if v.a.is_odd() && (v.a.clone() + v.b.clone()).mod_floor(&four).is_one() {
            return Ok(NormalizedGenerator {
                value: v,
                unit_exponent: k,
                negated: false,
                convention: Convention::PrimaryZi,
            });
        }
        v = QuadInt::new(-v.b.clone(), v.a.clone(), v.ring);
    }
    Err(QuadError::NotOdd)
}

/// Whether `w` is congruent to the square of an odd element modulo 4.
pub fn in_square_class<T: RingScalar>(w: &QuadInt<T>) -> bool {
    let four = <T as RingScalar>::from_i64(4);
    let a = w.a.mod_floor(&four).to_u8().unwrap_or(255);
    let b = w.b.mod_floor(&four).to_u8().unwrap_or(255);
    match w.ring {
        RingTag::Gaussian => b == 0 && (a == 1 || a == 3),
        RingTag::Sqrt2 => (a, b) == (1, 0) || (a, b) == (3, 2),
    }
}

fn square_class<T: RingScalar>(w: &QuadInt<T>) -> Result<NormalizedGenerator<T>, QuadError> {
    let u = QuadInt::fundamental_unit(w.ring);
    let (orders, negs): (&[i64], &[bool]) = match w.ring {
        RingTag::Gaussian => (&[0, 1, 2, 3], &[false]),
        RingTag::Sqrt2 => (&[0, 1], &[false, true]),
    };
    for &neg in negs {
        let mut v = if neg { -w } else { w.clone() };
        for &k in orders {
            if in_square_class(&v) {
                return Ok(NormalizedGenerator {
                    value: v,
                    unit_exponent: k,
                    negated: neg,
                    convention: Convention::SquareClassMod4,
                });
            }
            v = &v * &u;
        }
    }
    Err(QuadError::NoSquareClass)
}

/// Multiplies a totally positive `w` by the unique power `(1+√2)^{2k}` landing
/// in the sector; returns the image and `k`.
pub(crate) fn reduce_to_domain<T: RingScalar>(w: &QuadInt<T>) -> (QuadInt<T>, i64) {
    let (three, four, two) = (
        <T as RingScalar>::from_i64(3),
        <T as RingScalar>::from_i64(4),
        T::two(),
    );
    let (mut u, mut v) = (w.a.clone(), w.b.clone());
    let mut k = 0i64;
    loop {
        let twice_v = two.clone() * v.clone();
        if twice_v > u {
            (u, v) = (
                three.clone() * u.clone() - four.clone() * v.clone(),
                three.clone() * v - two.clone() * u,
            );
            k -= 1;
        } else if twice_v <= -u.clone() {
            (u, v) = (
                three.clone() * u.clone() + four.clone() * v.clone(),
                three.clone() * v + two.clone() * u,
            );
            k += 1;
        } else {
            return (QuadInt::new(u, v, w.ring), k);
        }
    }
}

pub fn in_domain<T: RingScalar>(w: &QuadInt<T>) -> bool {
    let twice_v = T::two() * w.b.clone();
    w.a.is_positive() && -w.a.clone() < twice_v && twice_v <= w.a
}

impl<T: RingScalar> QuadInt<T> {
    /// The canonical generator of the ideal `(self)`: first quadrant with
    /// `a > 0, b ≥ 0` in Z[i]; positive norm, `a > 0` and in the fundamental
    /// sector in Z[√2]. Units map to 1.
    pub fn canonical(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        match self.ring {
            RingTag::Gaussian => {
                let mut v = self.clone();
                while !(v.a.is_positive() && !v.b.is_negative()) {
                    v = QuadInt::new(-v.b.clone(), v.a.clone(), v.ring);
                }
                v
            }
            RingTag::Sqrt2 => {
                let mut v = self.clone();
                if v.norm().is_negative() {
                    v = &v * &QuadInt::fundamental_unit(v.ring);
                }
                if v.a.is_negative() {
                    v = -v;
                }
                reduce_to_domain(&v).0
            }
        }
    }

    /// Whether `self` and `other` generate the same ideal.
    pub fn associated(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    /// The canonical generator of the ideal `(w, z)`.
    pub fn gcd_ideal(w: &Self, z: &Self) -> Self {
        w.gcd_raw(z).canonical()
    }
}
