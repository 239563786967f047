use super::{jacobi, QrModulus, SymbolError, SymbolValue};
use crate::arith::is_prime;
use crate::quadring::{normalize_generator, split_prime, Convention, QuadError};
use crate::{Elem, RingTag};

/// `μ(w) = (w̄/(w))`; zero exactly when `w` is not primitive.
pub fn mu(w: &Elem) -> Result<SymbolValue, SymbolError> {
    let m = QrModulus::new(w).map_err(|_| SymbolError::EvenArgument)?;
    Ok(m.symbol(&w.conj()))
}

/// `γ(w, z) = (w̄z̄/(w))`.
pub fn gamma(w: &Elem, z: &Elem) -> Result<SymbolValue, SymbolError> {
    Ok(Gamma::new(w)?.eval(z))
}

/// `χ_w(z) = (z/(w̄))`.
pub fn chi_w(w: &Elem, z: &Elem) -> Result<SymbolValue, SymbolError> {
    Ok(QrModulus::new(&w.conj())
        .map_err(|_| SymbolError::EvenFirstArgument)?
        .symbol(z))
}

/// `z ↦ γ(w, z)` for a fixed `w`, with the factorization of `(w)` cached.
#[derive(Clone, Debug)]
pub struct Gamma {
    w: Elem,
    modulus: QrModulus,
    mu: SymbolValue,
}

impl Gamma {
    pub fn new(w: &Elem) -> Result<Self, SymbolError> {
        let modulus = QrModulus::new(w).map_err(|_| SymbolError::EvenFirstArgument)?;
        let mu = modulus.symbol(&w.conj());
        Ok(Self { w: *w, modulus, mu })
    }

    pub fn w(&self) -> Elem {
        self.w
    }

    pub fn mu(&self) -> SymbolValue {
        self.mu
    }

    pub fn eval(&self, z: &Elem) -> SymbolValue {
        if self.mu.is_zero() {
            return SymbolValue::ZERO;
        }
        self.mu * self.modulus.symbol(&z.conj())
    }
}

/// `χ_𝔱((w)) = (t/(w))` with `t = 1+i` or `√2`.
pub fn chi_t(w: &Elem) -> Result<SymbolValue, SymbolError> {
    let m = QrModulus::new(w).map_err(|_| SymbolError::EvenArgument)?;
    Ok(m.symbol(&Elem::two_prime(w.ring)))
}

/// Whether `w` is congruent to an odd square modulo `𝔱⁵`, i.e. to `±1`
/// modulo `4(1+i)` in Z[i], or to `1` or `3+2√2` modulo `4√2` in Z[√2].
pub fn is_square_mod_t5(w: &Elem) -> bool {
    let (a, b) = (w.a.rem_euclid(8), w.b.rem_euclid(8));
    match w.ring {
        RingTag::Gaussian => {
            ((a - 1) % 4 == 0 && (b - (a - 1)).rem_euclid(8) == 0)
                || ((a + 1) % 4 == 0 && (b - (a + 1)).rem_euclid(8) == 0)
        }
        RingTag::Sqrt2 => (a == 1 && b % 4 == 0) || (a == 3 && b % 4 == 2),
    }
}

/// Congruence evaluation of `χ_𝔱((w))`: take a generator of `(w)` that is a
/// square modulo 4 and test it modulo `𝔱⁵`; in Z[√2] the result is twisted by
/// the sign of the generator under `√2 ↦ −√2`. `None` when `(w)` has no such
/// generator.
pub fn chi_t_congruence(w: &Elem) -> Result<Option<SymbolValue>, SymbolError> {
    match normalize_generator(w, Convention::SquareClassMod4) {
        Ok(g) => {
            let v = g.value;
            let sq = SymbolValue::from_bool(is_square_mod_t5(&v));
            Ok(Some(match v.ring {
                RingTag::Gaussian => sq,
                RingTag::Sqrt2 => sq * SymbolValue::from_bool(conj_embedding_positive(&v)),
            }))
        }
        Err(QuadError::NoSquareClass) => Ok(None),
        Err(_) => Err(SymbolError::EvenArgument),
    }
}

/// `a − b√2 > 0`, decided exactly.
pub fn conj_embedding_positive(w: &Elem) -> bool {
    let (a, b) = (w.a as i128, w.b as i128);
    let (a2, b2) = (a * a, 2 * b * b);
    match (a.signum(), b.signum()) {
        (1, 1) => a2 > b2,
        (-1, -1) => a2 < b2,
        (_, 1) => false,
        (1, _) => true,
        (0, 0) => false,
        _ => b < 0,
    }
}

/// `χ₂(p)`: the average of `χ_𝔱` over the primes above `p`.
pub fn chi2(p: u64, ring: RingTag) -> Result<SymbolValue, SymbolError> {
    if p == 2 {
        return Err(SymbolError::RamifiedPrime(p));
    }
    if !is_prime(p) || p > i64::MAX as u64 {
        return Err(SymbolError::NotOddPrime(p));
    }
    if ring.splits(p) {
        let w = split_prime(p, ring).expect("split prime").value;
        let s = chi_t(&w)?.value() + chi_t(&w.conj())?.value();
        Ok(SymbolValue::new(s / 2))
    } else {
        chi_t(&Elem::from_int(p as i64, ring))
    }
}

/// The Hecke character `ψ_w` of conductor `(w̄)` (and the infinite places for
/// d = 8) evaluated at the ideal `(z)`.
pub fn psi_w(w: &Elem, z: &Elem) -> Result<SymbolValue, SymbolError> {
    let p = w.norm().unsigned_abs();
    if p % 8 != 1 || !is_prime(p) {
        return Err(SymbolError::BadCharacterModulus);
    }
    if !z.is_odd() {
        return Err(SymbolError::EvenArgument);
    }
    let chi = QrModulus::from_prime_generator(&w.conj()).symbol(z);
    if chi.is_zero() {
        return Err(SymbolError::BadConductor);
    }
    match w.ring {
        RingTag::Gaussian => Ok(chi),
        RingTag::Sqrt2 => {
            let chi_unit = jacobi(-1, (w.a + w.b).unsigned_abs());
            if chi_unit == SymbolValue::ONE || z.norm() > 0 {
                Ok(chi)
            } else {
                Ok(chi * SymbolValue::MINUS_ONE)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: RingTag = RingTag::Gaussian;
    const S: RingTag = RingTag::Sqrt2;

    fn v(x: i64) -> SymbolValue {
        SymbolValue::new(x)
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&Elem::new(1, 4, G)), Ok(v(1)));
        assert_eq!(mu(&Elem::from_int(5, G)), Ok(v(0)));
        assert_eq!(mu(&Elem::new(7, 2, S)), Ok(v(-1)));
        assert_eq!(mu(&Elem::new(1, 1, G)), Err(SymbolError::EvenArgument));
    }

    #[test]
    fn gamma_examples() {
        let w = Elem::new(1, 4, G);
        assert_eq!(gamma(&w, &Elem::new(5, 8, G)), Ok(v(-1)));
        assert_eq!(gamma(&w, &Elem::one(G)), mu(&w));
        assert_eq!(gamma(&Elem::from_int(5, G), &Elem::new(2, 7, G)), Ok(v(0)));
        assert_eq!(
            gamma(&Elem::new(2, 0, S), &Elem::one(S)),
            Err(SymbolError::EvenFirstArgument)
        );
    }

    #[test]
    fn chi_t_examples() {
        assert_eq!(chi_t(&Elem::new(1, 4, G)), Ok(v(-1)));
        assert_eq!(chi_t_congruence(&Elem::new(1, 4, G)), Ok(Some(v(-1))));
        assert_eq!(chi_t(&Elem::new(-5, -2, S)), Ok(v(-1)));
        assert_eq!(chi_t_congruence(&Elem::new(-5, -2, S)), Ok(Some(v(-1))));
        assert_eq!(chi_t(&Elem::new(1, -4, G)), chi_t(&Elem::new(1, 4, G)));
        // −5−2√2 is a square modulo 4√2 but negative under √2 ↦ −√2
        assert!(is_square_mod_t5(&Elem::new(-5, -2, S)));
        assert_eq!(chi_t(&Elem::new(-11, -4, S)), Ok(v(1)));
        assert_eq!(chi_t_congruence(&Elem::new(-11, -4, S)), Ok(Some(v(1))));
        assert_eq!(chi_t_congruence(&Elem::new(1, 2, G)), Ok(None));
        assert_eq!(chi_t(&Elem::new(2, 2, G)), Err(SymbolError::EvenArgument));
    }

    #[test]
    fn conjugate_embedding_sign() {
        for a in -30i64..30 {
            for b in -30i64..30 {
                let exact = conj_embedding_positive(&Elem::new(a, b, S));
                let approx = a as f64 - b as f64 * 2f64.sqrt();
                if approx.abs() > 1e-9 {
                    assert_eq!(exact, approx > 0.0, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn chi2_examples() {
        assert_eq!(chi2(17, G), Ok(v(-1)));
        assert_eq!(chi2(97, G), Ok(v(-1)));
        assert_eq!(chi2(89, G), Ok(v(-1)));
        assert_eq!(chi2(73, G), Ok(v(-1)));
        assert_eq!(chi2(113, G), Ok(v(1)));
        assert_eq!(chi2(29, G), Ok(v(0)));
        assert_eq!(chi2(7, S), Ok(v(0)));
        assert_eq!(chi2(2, S), Err(SymbolError::RamifiedPrime(2)));
        for p in crate::sieve::primes_up_to(2000).into_iter().filter(|p| p % 8 == 1) {
            for ring in RingTag::ALL {
                assert_ne!(chi2(p, ring).unwrap(), v(0), "p={p}");
            }
        }
    }

    #[test]
    fn psi_examples() {
        let w = Elem::new(1, 4, G);
        assert_eq!(psi_w(&w, &Elem::new(5, 8, G)), Ok(v(-1)));
        assert_eq!(psi_w(&w, &Elem::one(G)), Ok(v(1)));
        let w8 = Elem::new(-5, -2, S);
        assert_eq!(jacobi(-1, 7), v(-1));
        assert_eq!(psi_w(&w8, &Elem::one(S)), Ok(v(1)));
        // twisted branch: the generator −1+√2... of the unit ideal has norm −1
        assert_eq!(psi_w(&w8, &Elem::new(1, 1, S)), Ok(v(1)));
        assert_eq!(psi_w(&w8, &Elem::new(-5, 2, S)), Err(SymbolError::BadConductor));
        assert_eq!(psi_w(&Elem::new(2, 1, G), &Elem::one(G)), Err(SymbolError::BadCharacterModulus));
    }
}
