
use super::{jacobi_u64, SymbolError, SymbolValue};
use crate::arith::{factorize, mod_inv};
use crate::quadring::split_prime;
use crate::{Elem, QuadInt, RingScalar, RingTag};

/// An odd prime ideal of Z[√d₀].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeIdeal {
    /// Degree one: `(π)` with `Z[√d₀]/(π) ≅ Z/p`, `√d₀ ↦ root`.
    Split { p: u64, root: u64, generator: Elem },
    /// Degree two: `(p)` with residue field of `p²` elements.
    Inert { p: u64 },
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        match *self {
            PrimeIdeal::Split { p, .. } => p,
            PrimeIdeal::Inert { p } => p * p,
        }
    }

    /// `(n/𝔭)`.
    pub fn symbol<T: RingScalar>(&self, n: &QuadInt<T>) -> SymbolValue {
        match *self {
            PrimeIdeal::Split { p, root, .. } => {
                let x = (mod_p(&n.a, p) as u128 + mod_p(&n.b, p) as u128 * root as u128)
                    % p as u128;
                jacobi_u64(x as u64, p)
            }
            PrimeIdeal::Inert { p } => {
                let x = mod_p(&n.a, p);
                let y = mod_p(&n.b, p);
                if x == 0 && y == 0 {
                    return SymbolValue::ZERO;
                }
                let d0 = (n.ring.d0() as i128).rem_euclid(p as i128) as u64;
                let e = (p as u128 * p as u128 - 1) / 2;
                let (r, _) = fp2_pow((x, y), e, d0, p);
                SymbolValue::from_bool(r == 1)
            }
        }
    }
}

fn mod_p<T: RingScalar>(x: &T, p: u64) -> u64 {
    let m = <T as RingScalar>::from_i64(p as i64);
    x.mod_floor(&m).to_u64().expect("residue fits")
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn fp2_mul(u: (u64, u64), v: (u64, u64), d0: u64, p: u64) -> (u64, u64) {
    let re = (mulmod(u.0, v.0, p) as u128 + mulmod(d0, mulmod(u.1, v.1, p), p) as u128)
        % p as u128;
    let im = (mulmod(u.0, v.1, p) as u128 + mulmod(u.1, v.0, p) as u128) % p as u128;
    (re as u64, im as u64)
}

fn fp2_pow(mut base: (u64, u64), mut e: u128, d0: u64, p: u64) -> (u64, u64) {
    let mut acc = (1, 0);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp2_mul(acc, base, d0, p);
        }
        base = fp2_mul(base, base, d0, p);
        e >>= 1;
    }
    acc
}

/// An odd modulus `(m)` factored into prime ideals, reusable across symbols.
#[derive(Clone, Debug)]
pub struct QrModulus {
    ring: RingTag,
    factors: Vec<(PrimeIdeal, u32)>,
}

impl QrModulus {
    pub fn new(m: &Elem) -> Result<Self, SymbolError> {
        if !m.is_odd() {
            return Err(SymbolError::EvenModulus);
        }
        let ring = m.ring;
        let n = m.norm_exact().unsigned_abs();
        let n = u64::try_from(n).map_err(|_| SymbolError::Overflow)?;
        let mut factors = Vec::new();
        for (p, _) in factorize(n) {
            if ring.splits(p) {
                let pi = split_prime(p, ring).expect("split prime").value;
                for g in [pi, pi.conj()] {
                    let mut rest = *m;
                    let mut e = 0;
                    while let Some(q) = rest.div_exact(&g) {
                        rest = q;
                        e += 1;
                    }
                    if e > 0 {
                        factors.push((split_ideal(&g, p), e));
                    }
                }
            } else {
                let mut c = m.content().unsigned_abs();
                let mut e = 0;
                while c.is_multiple_of(p) {
                    c /= p;
                    e += 1;
                }
                factors.push((PrimeIdeal::Inert { p }, e));
            }
        }
        Ok(Self { ring, factors })
    }

    /// The modulus `(w)` for `w` of prime norm `±p`, without factoring.
    pub fn from_prime_generator(w: &Elem) -> Self {
        let p = w.norm().unsigned_abs();
        Self {
            ring: w.ring,
            factors: vec![(split_ideal(w, p), 1)],
        }
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn factors(&self) -> &[(PrimeIdeal, u32)] {
        &self.factors
    }

    /// `(n/(m)) = ∏ (n/𝔭)^e`.
    pub fn symbol<T: RingScalar>(&self, n: &QuadInt<T>) -> SymbolValue {
        debug_assert_eq!(n.ring, self.ring);
        let mut acc = SymbolValue::ONE;
        for (f, e) in &self.factors {
            acc *= f.symbol(n).pow(*e);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }
}

fn split_ideal(g: &Elem, p: u64) -> PrimeIdeal {
    let binv = mod_inv(g.b as i128, p).expect("degree-one prime generator");
    let root = ((p as i128 - (g.a as i128).rem_euclid(p as i128)) * binv as i128)
        .rem_euclid(p as i128) as u64;
    PrimeIdeal::Split {
        p,
        root,
        generator: *g,
    }
}

/// The quadratic residue symbol `(n/(m))` for odd `m`.
pub fn qr_symbol<T: RingScalar>(n: &QuadInt<T>, m: &Elem) -> Result<SymbolValue, SymbolError> {
    Ok(QrModulus::new(m)?.symbol(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadring::ResidueRing;
    use crate::symbols::jacobi;

    const G: RingTag = RingTag::Gaussian;
    const S: RingTag = RingTag::Sqrt2;

    #[test]
    fn examples() {
        let w = Elem::new(1, 4, G);
        assert_eq!(qr_symbol(&Elem::new(-27, -28, G), &w), Ok(SymbolValue::MINUS_ONE));
        assert_eq!(qr_symbol(&Elem::from_int(3, G), &w), Ok(SymbolValue::MINUS_ONE));
        assert_eq!(qr_symbol(&Elem::new(5, 7, G), &Elem::one(G)), Ok(SymbolValue::ONE));
        assert_eq!(qr_symbol(&Elem::new(5, 7, S), &Elem::new(1, 1, S)), Ok(SymbolValue::ONE));
        assert_eq!(
            qr_symbol(&Elem::one(G), &Elem::new(1, 1, G)),
            Err(SymbolError::EvenModulus)
        );
    }

    #[test]
    fn inert_symbol_matches_norm_test() {
        for ring in RingTag::ALL {
            for p in [3u64, 7, 11, 19, 23, 43, 59, 67, 83] {
                if ring.splits(p) {
                    continue;
                }
                let m = QrModulus::new(&Elem::from_int(p as i64, ring)).unwrap();
                for a in -12..12 {
                    for b in -12..12 {
                        let n = Elem::new(a, b, ring);
                        let expect = jacobi(n.norm(), p);
                        assert_eq!(m.symbol(&n), expect, "{n} mod {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_reconstructs_modulus() {
        for ring in RingTag::ALL {
            for a in -25i64..25 {
                for b in -25i64..25 {
                    let m = Elem::new(a, b, ring);
                    if !m.is_odd() {
                        continue;
                    }
                    let q = QrModulus::new(&m).unwrap();
                    let total: u64 = q.factors().iter().map(|(f, e)| f.norm().pow(*e)).product();
                    assert_eq!(total, m.norm().unsigned_abs(), "{m}");
                }
            }
        }
    }

    #[test]
    fn primitive_modulus_reduces_to_jacobi() {
        for ring in RingTag::ALL {
            for (a, b) in [(1, 4), (3, 8), (7, 2), (5, 2), (9, 4), (13, 6)] {
                let m = Elem::new(a, b, ring);
                if !m.is_primitive() {
                    continue;
                }
                let r = ResidueRing::new(&m).unwrap();
                let n_abs = m.norm().unsigned_abs();
                let q = QrModulus::new(&m).unwrap();
                let mut sum_ring = 0i64;
                for z in r.iter() {
                    let img = r.to_rational(&z).unwrap();
                    let s = q.symbol(&z);
                    assert_eq!(s, jacobi(img as i64, n_abs), "{z} mod {m}");
                    sum_ring += s.value();
                }
                let sum_jac: i64 = (0..n_abs).map(|k| jacobi(k as i64, n_abs).value()).sum();
                assert_eq!(sum_ring, sum_jac);
            }
        }
    }

    #[test]
    fn big_numerators() {
        let m = Elem::new(1, 4, G);
        let n = Elem::new(-27, -28, G).to_big();
        assert_eq!(QrModulus::new(&m).unwrap().symbol(&n), SymbolValue::MINUS_ONE);
    }
}
