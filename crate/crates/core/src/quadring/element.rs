use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::RingTag;
use crate::scalar::RingScalar;

/// The element `a + b√d₀` of the ring named by `ring`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt<T> {
    pub a: T,
    pub b: T,
    pub ring: RingTag,
}

impl<T: RingScalar> QuadInt<T> {
    pub fn new(a: T, b: T, ring: RingTag) -> Self {
        Self { a, b, ring }
    }

    pub fn from_int(a: T, ring: RingTag) -> Self {
        Self::new(a, T::zero(), ring)
    }

    pub fn zero(ring: RingTag) -> Self {
        Self::from_int(T::zero(), ring)
    }

    pub fn one(ring: RingTag) -> Self {
        Self::from_int(T::one(), ring)
    }

    /// `i` or `√2`.
    pub fn root(ring: RingTag) -> Self {
        Self::new(T::zero(), T::one(), ring)
    }

    /// The generator `t` of the prime above 2: `1+i` or `√2`.
    pub fn two_prime(ring: RingTag) -> Self {
        match ring {
            RingTag::Gaussian => Self::new(T::one(), T::one(), ring),
            RingTag::Sqrt2 => Self::root(ring),
        }
    }

    /// A generator of the unit group modulo ±1: `i` or `ε = 1+√2`.
    pub fn fundamental_unit(ring: RingTag) -> Self {
        match ring {
            RingTag::Gaussian => Self::root(ring),
            RingTag::Sqrt2 => Self::new(T::one(), T::one(), ring),
        }
    }

    fn d0(&self) -> T {
        <T as RingScalar>::from_i64(self.ring.d0())
    }

    pub fn norm(&self) -> T {
        self.a.clone() * self.a.clone() - self.d0() * self.b.clone() * self.b.clone()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.ring)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    /// Coprime to the prime above 2.
    pub fn is_odd(&self) -> bool {
        self.norm().is_odd()
    }

    /// Odd norm and coprime coordinates; equivalently `gcd((w), (w̄)) = (1)`.
    pub fn is_primitive(&self) -> bool {
        self.is_odd() && self.a.gcd(&self.b).is_one()
    }

    /// Rational content `gcd(a, b) ≥ 0`.
    pub fn content(&self) -> T {
        self.a.gcd(&self.b)
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(self.a.clone() * k.clone(), self.b.clone() * k.clone(), self.ring)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `u^k` for the fundamental unit `u` and any integer `k`.
    pub fn unit_power(ring: RingTag, k: i64) -> Self {
        let u = Self::fundamental_unit(ring);
        let p = u.pow(k.unsigned_abs() as u32);
        if k < 0 {
            // inverse of a unit is its conjugate up to the sign of the norm
            let c = p.conj();
            if p.norm().is_negative() {
                -c
            } else {
                c
            }
        } else {
            p
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let num = self * &d.conj();
        let (qa, ra) = num.a.div_rem(&n);
        let (qb, rb) = num.b.div_rem(&n);
        (ra.is_zero() && rb.is_zero()).then(|| Self::new(qa, qb, self.ring))
    }

    pub fn divides(&self, x: &Self) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        x.div_exact(self).is_some()
    }

    /// Euclidean division with the quotient rounded coordinatewise; the
    /// remainder satisfies `|N(r)| < |N(d)|`.
    pub fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        let mut n = d.norm();
        let mut num = self * &d.conj();
        if n.is_negative() {
            n = -n;
            num = -num;
        }
        let q = Self::new(T::div_round(&num.a, &n), T::div_round(&num.b, &n), self.ring);
        let r = self - &(&q * d);
        (q, r)
    }

    /// A generator of the ideal `(self, other)`, not normalized.
    pub fn gcd_raw(&self, other: &Self) -> Self {
        let (mut x, mut y) = (self.clone(), other.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem_euclid(&y);
            x = y;
            y = r;
        }
        x
    }

    pub fn to_big(&self) -> QuadInt<BigInt> {
        QuadInt::new(
            self.a.to_bigint().expect("integers convert"),
            self.b.to_bigint().expect("integers convert"),
            self.ring,
        )
    }

    /// Converts to another scalar type, failing if a coordinate does not fit.
    pub fn cast<U: RingScalar>(&self) -> Option<QuadInt<U>> {
        let a = U::try_from(self.a.to_bigint()?).ok()?;
        let b = U::try_from(self.b.to_bigint()?).ok()?;
        Some(QuadInt::new(a, b, self.ring))
    }
}

impl QuadInt<i64> {
    /// Product computed in 128 bits; `None` if it leaves the 64-bit range.
    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let d0 = self.ring.d0() as i128;
        let (a, b, c, d) = (self.a as i128, self.b as i128, o.a as i128, o.b as i128);
        let x = a.checked_mul(c)?.checked_add(d0.checked_mul(b)?.checked_mul(d)?)?;
        let y = a.checked_mul(d)?.checked_add(b.checked_mul(c)?)?;
        Some(Self::new(x.try_into().ok()?, y.try_into().ok()?, self.ring))
    }

    /// Exact norm whatever the coordinate size.
    pub fn norm_exact(&self) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        a * a - self.ring.d0() as i128 * b * b
    }

    /// Product that falls back to arbitrary precision on overflow.
    pub fn mul_promote(&self, o: &Self) -> QuadInt<BigInt> {
        match self.checked_mul(o) {
            Some(p) => p.to_big(),
            None => &self.to_big() * &o.to_big(),
        }
    }
}

impl<T: RingScalar> fmt::Display for QuadInt<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.ring {
            RingTag::Gaussian => "i",
            RingTag::Sqrt2 => "√2",
        };
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.b.is_negative() {
            write!(f, "{}-{}{}", self.a, -self.b.clone(), r)
        } else {
            write!(f, "{}+{}{}", self.a, self.b, r)
        }
    }
}

impl<'a, T: RingScalar> Add<&'a QuadInt<T>> for &'a QuadInt<T> {
    type Output = QuadInt<T>;
    fn add(self, o: &'a QuadInt<T>) -> QuadInt<T> {
        debug_assert_eq!(self.ring, o.ring);
        QuadInt::new(self.a.clone() + o.a.clone(), self.b.clone() + o.b.clone(), self.ring)
    }
}

impl<'a, T: RingScalar> Sub<&'a QuadInt<T>> for &'a QuadInt<T> {
    type Output = QuadInt<T>;
    fn sub(self, o: &'a QuadInt<T>) -> QuadInt<T> {
        debug_assert_eq!(self.ring, o.ring);
        QuadInt::new(self.a.clone() - o.a.clone(), self.b.clone() - o.b.clone(), self.ring)
    }
}

impl<'a, T: RingScalar> Mul<&'a QuadInt<T>> for &'a QuadInt<T> {
    type Output = QuadInt<T>;
    fn mul(self, o: &'a QuadInt<T>) -> QuadInt<T> {
        debug_assert_eq!(self.ring, o.ring);
        let d0 = self.d0();
        QuadInt::new(
            self.a.clone() * o.a.clone() + d0 * self.b.clone() * o.b.clone(),
            self.a.clone() * o.b.clone() + self.b.clone() * o.a.clone(),
            self.ring,
        )
    }
}

impl<T: RingScalar> Neg for &QuadInt<T> {
    type Output = QuadInt<T>;
    fn neg(self) -> QuadInt<T> {
        QuadInt::new(-self.a.clone(), -self.b.clone(), self.ring)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl<T: RingScalar> $tr for QuadInt<T> {
            type Output = QuadInt<T>;
            fn $f(self, o: QuadInt<T>) -> QuadInt<T> {
                (&self).$f(&o)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<T: RingScalar> Neg for QuadInt<T> {
    type Output = QuadInt<T>;
    fn neg(self) -> QuadInt<T> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Elem;

    const G: RingTag = RingTag::Gaussian;
    const S: RingTag = RingTag::Sqrt2;

    #[test]
    fn norms() {
        assert_eq!(Elem::new(3, 2, G).norm(), 13);
        assert_eq!(Elem::new(-5, -2, S).norm(), 17);
        assert_eq!(Elem::one(G).norm(), 1);
        assert_eq!(Elem::one(S).norm(), 1);
    }

    #[test]
    fn conjugation() {
        let w = Elem::new(-27, 28, G);
        assert_eq!(w.conj(), Elem::new(-27, -28, G));
        assert_eq!(Elem::new(71, 42, S).conj(), Elem::new(71, -42, S));
        assert_eq!(w.conj().conj(), w);
    }

    #[test]
    fn primitivity() {
        assert!(Elem::new(1, 4, G).is_primitive());
        assert!(!Elem::new(5, 0, G).is_primitive());
        assert!(!Elem::new(3, 3, G).is_primitive());
    }

    #[test]
    fn products_from_pairs() {
        let w = Elem::new(1, 4, G);
        let z = Elem::new(5, 8, G);
        assert_eq!(w * z, Elem::new(-27, 28, G));
        let w = Elem::new(-5, -2, S);
        let z = Elem::new(-11, -4, S);
        assert_eq!(w * z, Elem::new(71, 42, S));
    }

    #[test]
    fn unit_powers_invert() {
        for ring in RingTag::ALL {
            for k in -5..=5 {
                let u = Elem::unit_power(ring, k);
                assert_eq!(u * Elem::unit_power(ring, -k), Elem::one(ring));
            }
        }
        assert_eq!(Elem::unit_power(S, 2), Elem::new(3, 2, S));
        assert_eq!(Elem::unit_power(S, -2), Elem::new(3, -2, S));
    }

    #[test]
    fn euclidean_division_shrinks_norm() {
        for ring in RingTag::ALL {
            for a in -20..20 {
                for b in -20..20 {
                    let x = Elem::new(a, b, ring);
                    let d = Elem::new(3, -2 + (a & 1), ring);
                    let (q, r) = x.div_rem_euclid(&d);
                    assert_eq!((q * d) + r, x);
                    assert!(r.norm().abs() < d.norm().abs());
                }
            }
        }
    }

    #[test]
    fn exact_division() {
        let five = Elem::from_int(5, G);
        assert_eq!(five.div_exact(&Elem::new(1, 2, G)), Some(Elem::new(1, -2, G)));
        assert_eq!(Elem::new(1, 4, G).div_exact(&Elem::new(1, 2, G)), None);
    }

    #[test]
    fn overflow_promotes() {
        let w = Elem::new(4_000_000_000, 1, S);
        assert!(w.checked_mul(&w).is_none());
        let big = w.mul_promote(&w);
        assert_eq!(big, &w.to_big() * &w.to_big());
        assert_eq!(big.norm(), BigInt::from(w.norm_exact()).pow(2));
        assert_eq!(big.cast::<i64>(), None);
        assert_eq!(w.to_big().cast::<i64>(), Some(w));
    }
}
