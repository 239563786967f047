use super::{QuadError, RingTag};
use crate::arith::ext_gcd;
use crate::Elem;

/// Largest residue system that is materialized as a list.
pub const MATERIALIZE_LIMIT: u128 = 1 << 24;

/// The residue ring `Z[√d₀]/(m)` with representatives `x + y√d₀`,
/// `0 ≤ y < c`, `0 ≤ x < e`, where `c = gcd(a, b)` and `ce = |N(m)|`.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    modulus: Elem,
    c: u64,
    e: u64,
    /// `(shift, c)` lies in `(m)`.
    shift: u64,
}

impl ResidueRing {
    pub fn new(m: &Elem) -> Result<Self, QuadError> {
        if m.is_zero() {
            return Err(QuadError::NotOdd);
        }
        let (a, b) = (m.a as i128, m.b as i128);
        let n = m.norm_exact().unsigned_abs();
        let (c, u, v) = ext_gcd(b, a);
        let e = n / c as u128;
        if e > u64::MAX as u128 {
            return Err(QuadError::Overflow);
        }
        // u·m + v·m√d₀ = (u·a + v·d₀·b) + c√d₀
        let x0 = u * a + v * m.ring.d0() as i128 * b;
        Ok(Self {
            modulus: *m,
            c: c as u64,
            e: e as u64,
            shift: x0.rem_euclid(e as i128) as u64,
        })
    }

    pub fn modulus(&self) -> Elem {
        self.modulus
    }

    pub fn ring(&self) -> RingTag {
        self.modulus.ring
    }

    pub fn len(&self) -> u128 {
        self.c as u128 * self.e as u128
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The additive group is cyclic exactly when the modulus is primitive.
    pub fn is_cyclic(&self) -> bool {
        self.c == 1
    }

    pub fn dims(&self) -> (u64, u64) {
        (self.e, self.c)
    }

    pub fn reduce(&self, z: &Elem) -> Elem {
        let (x, y) = self.reduce_coords(z.a as i128, z.b as i128);
        Elem::new(x as i64, y as i64, self.ring())
    }

    fn reduce_coords(&self, x: i128, y: i128) -> (u64, u64) {
        let c = self.c as i128;
        let k = y.div_euclid(c);
        let y = y.rem_euclid(c);
        let x = (x - k * self.shift as i128).rem_euclid(self.e as i128);
        (x as u64, y as u64)
    }

    /// Position of the residue of `z` in `0..len()`.
    pub fn index(&self, z: &Elem) -> u128 {
        let (x, y) = self.reduce_coords(z.a as i128, z.b as i128);
        y as u128 * self.e as u128 + x as u128
    }

    pub fn element(&self, idx: u128) -> Elem {
        let y = idx / self.e as u128;
        let x = idx % self.e as u128;
        Elem::new(x as i64, y as i64, self.ring())
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.len()).map(|i| self.element(i))
    }

    pub fn materialize(&self) -> Result<Vec<Elem>, QuadError> {
        if self.len() > MATERIALIZE_LIMIT {
            return Err(QuadError::BoundExceeded(self.len()));
        }
        Ok(self.iter().collect())
    }

    pub fn conj(&self, z: &Elem) -> Elem {
        self.reduce(&z.conj())
    }

    /// For a primitive modulus, the image of `√d₀` under `Z[√d₀]/(m) ≅ Z/N`.
    pub fn root_image(&self) -> Option<u64> {
        self.is_cyclic().then(|| (self.e - self.shift) % self.e)
    }

    /// For a primitive modulus, the image of `z` in `Z/N`.
    pub fn to_rational(&self, z: &Elem) -> Option<u64> {
        self.is_cyclic().then(|| self.reduce_coords(z.a as i128, z.b as i128).0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: RingTag = RingTag::Gaussian;
    const S: RingTag = RingTag::Sqrt2;

    #[test]
    fn primitive_modulus_is_cyclic() {
        let r = ResidueRing::new(&Elem::new(1, 4, G)).unwrap();
        assert_eq!(r.len(), 17);
        assert!(r.is_cyclic());
        assert_eq!(r.root_image(), Some(4));
        let r = ResidueRing::new(&Elem::new(1, -4, G)).unwrap();
        assert_eq!(r.root_image(), Some(13));
    }

    #[test]
    fn rational_moduli() {
        let r = ResidueRing::new(&Elem::from_int(5, G)).unwrap();
        assert_eq!(r.len(), 25);
        assert!(!r.is_cyclic());
        let r = ResidueRing::new(&Elem::from_int(12, S)).unwrap();
        assert_eq!(r.dims(), (12, 12));
        let all = r.materialize().unwrap();
        let mut conj: Vec<u128> = all.iter().map(|z| r.index(&r.conj(z))).collect();
        conj.sort_unstable();
        assert_eq!(conj, (0..144).collect::<Vec<_>>());
    }

    #[test]
    fn reduction_is_exact() {
        for ring in RingTag::ALL {
            for m in [Elem::new(3, 6, ring), Elem::new(7, 2, ring), Elem::new(-5, 10, ring)] {
                let r = ResidueRing::new(&m).unwrap();
                assert_eq!(r.len(), m.norm().unsigned_abs() as u128);
                let mut seen = std::collections::HashSet::new();
                for a in -30..30 {
                    for b in -30..30 {
                        let z = Elem::new(a, b, ring);
                        let red = r.reduce(&z);
                        assert!(m.divides(&(z - red)), "{z} -> {red} mod {m}");
                        assert_eq!(r.element(r.index(&z)), red);
                        seen.insert(r.index(&z));
                    }
                }
                assert_eq!(seen.len() as u128, r.len());
            }
        }
        let r = ResidueRing::new(&Elem::new(3, 1, S)).unwrap();
        let s = r.root_image().unwrap();
        assert_eq!(s * s % 7, 2);
    }
}
