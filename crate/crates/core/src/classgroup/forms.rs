use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, isqrt};

/// The binary quadratic form `Ax² + Bxy + Cy²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BQForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BQForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// The form with leading coefficient `a` and middle coefficient `b`.
    pub fn from_ab(a: i64, b: i64, disc: i64) -> Self {
        let c = (b as i128 * b as i128 - disc as i128) / (4 * a as i128);
        Self::new(a, b, c as i64)
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        crate::arith::gcd_u64(
            crate::arith::gcd_u64(self.a.unsigned_abs(), self.b.unsigned_abs()),
            self.c.unsigned_abs(),
        ) == 1
    }

    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Self::from_ab(1, b, disc)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
    }

    /// Reduced positive definite: `|B| ≤ A ≤ C`, and `B ≥ 0` if `|B| = A` or
    /// `A = C`.
    pub fn is_reduced_definite(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
    }

    /// Reduced indefinite: `0 < B < √D` and `√D − B < 2|A| < √D + B`.
    pub fn is_reduced_indefinite(&self, sqrt_floor: i64) -> bool {
        let (a, b) = (self.a.abs(), self.b);
        0 < b && b <= sqrt_floor && 2 * a > sqrt_floor - b && 2 * a <= sqrt_floor + b
    }

    /// Reduction of a positive definite form.
    pub fn reduce_definite(mut self) -> Self {
        loop {
            self = self.normalize_definite();
            if self.a > self.c {
                self = Self::new(self.c, -self.b, self.a);
                continue;
            }
            if self.a == self.c && self.b < 0 {
                self.b = -self.b;
            }
            return self;
        }
    }

    fn normalize_definite(self) -> Self {
        let (a, b) = (self.a as i128, self.b as i128);
        if -a < b && b <= a {
            return self;
        }
        // b' = b + 2ak in (−a, a]
        let k = (a - b).div_euclid(2 * a);
        let nb = b + 2 * a * k;
        Self::from_ab(self.a, nb as i64, self.discriminant())
    }

    /// One step of the indefinite reduction operator:
    /// `(A, B, C) ↦ (C, r, (r² − D)/4C)` with `r ≡ −B (mod 2C)` normalized.
    pub fn rho(&self, disc: i64, sqrt_floor: i64) -> Self {
        let c = self.c as i128;
        let m = 2 * c.abs();
        let s = sqrt_floor as i128;
        let r = if c.abs() > s {
            // −|c| < r ≤ |c|
            let lo = -c.abs() + 1;
            lo + (-(self.b as i128) - lo).rem_euclid(m)
        } else {
            // √D − 2|c| < r < √D
            let lo = s + 1 - m;
            lo + (-(self.b as i128) - lo).rem_euclid(m)
        };
        Self::from_ab(self.c, r as i64, disc)
    }

    /// Reduction of an indefinite form by iterating `rho`.
    pub fn reduce_indefinite(mut self, disc: i64, sqrt_floor: i64) -> Self {
        while !self.is_reduced_indefinite(sqrt_floor) {
            self = self.rho(disc, sqrt_floor);
        }
        self
    }

    /// Dirichlet composition (unreduced).
    pub fn compose(&self, o: &Self) -> Self {
        let disc = self.discriminant() as i128;
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (o.a as i128, o.b as i128);
        let s = (b1 + b2) / 2;
        let (g, x, y) = ext_gcd(a1, a2);
        let (e, x2, w) = ext_gcd(g, s);
        let (u, v) = (x2 * x, x2 * y);
        let big_b = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + disc) / 2) / e;
        let big_a = a1 * a2 / (e * e);
        let m = 2 * big_a.abs();
        let big_b = big_b.rem_euclid(m);
        let big_c = (big_b * big_b - disc) / (4 * big_a);
        Self::new(big_a as i64, big_b as i64, big_c as i64)
    }
}

/// `⌊√D⌋` for `D > 0`.
pub fn sqrt_floor(disc: i64) -> i64 {
    isqrt(disc as u64) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definite_reduction() {
        let f = BQForm::new(3, 14, 17).reduce_definite();
        assert_eq!(f.discriminant(), 14 * 14 - 4 * 3 * 17);
        assert!(f.is_reduced_definite());
        assert_eq!(BQForm::new(2, -2, 3).reduce_definite(), BQForm::new(2, 2, 3));
    }

    #[test]
    fn composition_preserves_discriminant() {
        let d = -6052;
        let f = BQForm::from_ab(2, 2, d);
        let g = BQForm::from_ab(11, 8, d);
        let h = f.compose(&g);
        assert_eq!(h.discriminant(), d);
        assert!(h.is_primitive());
        let d = 136;
        let f = BQForm::from_ab(-3, 4, d).compose(&BQForm::from_ab(5, 6, d));
        assert_eq!(f.discriminant(), d);
    }

    #[test]
    fn rho_keeps_reduced_forms_reduced() {
        let d = 8 * 17 * 41;
        let s = sqrt_floor(d);
        let mut f = BQForm::principal(d).reduce_indefinite(d, s);
        for _ in 0..50 {
            f = f.rho(d, s);
            assert!(f.is_reduced_indefinite(s), "{f:?}");
            assert_eq!(f.discriminant(), d);
        }
    }
}
