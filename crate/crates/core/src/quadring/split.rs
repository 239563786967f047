use super::normalize::in_square_class;
use super::{normalize_generator, Convention, NormalizedGenerator, QuadError, RingTag};
use crate::arith::{is_prime, isqrt, sqrt_mod};
use crate::Elem;

/// A generator of a prime above the split prime `p`.
///
/// For `p ≡ 1 (mod 8)` the generator is congruent to a square modulo 4 and is
/// chosen among `{±w, ±w̄}` (and `i`-multiples in Z[i]) by the smallest
/// `(|b|, |a|, ab < 0, a < 0)`. Otherwise the primary associate (Z[i]) or the
/// positive-norm fundamental-domain representative (Z[√2]) is used, with the
/// same tie-break between the two conjugate primes.
pub fn split_prime(p: u64, ring: RingTag) -> Result<NormalizedGenerator<i64>, QuadError> {
    if p.is_multiple_of(2) || !ring.splits(p) || !is_prime(p) || p > i64::MAX as u64 {
        return Err(QuadError::NotSplit { p, d0: ring.d0() });
    }
    let base = descend(p, ring).canonical();
    let conj = base.conj().canonical();
    let key = |w: &Elem| (w.b.abs(), w.a.abs(), (w.a < 0) != (w.b < 0) && w.b != 0, w.a < 0);
    let (best, convention) = if p % 8 == 1 {
        let units: Vec<Elem> = match ring {
            RingTag::Gaussian => (0..4).map(|k| Elem::unit_power(ring, k)).collect(),
            RingTag::Sqrt2 => vec![Elem::one(ring), -Elem::one(ring)],
        };
        let best = [base, conj]
            .iter()
            .flat_map(|g| units.iter().map(move |u| g * u))
            .filter(in_square_class)
            .min_by_key(key)
            .expect("a prime over p = 1 mod 8 has a square-class generator");
        (best, Convention::SquareClassMod4)
    } else {
        let conv = match ring {
            RingTag::Gaussian => Convention::PrimaryZi,
            RingTag::Sqrt2 => Convention::FundamentalDomainZsqrt2,
        };
        let best = [base, conj]
            .iter()
            .map(|g| normalize_generator(g, conv).expect("odd prime generator").value)
            .min_by_key(key)
            .expect("two candidates");
        (best, conv)
    };
    normalize_generator(&best, convention)
}

/// An element of norm `±p`.
fn descend(p: u64, ring: RingTag) -> Elem {
    match ring {
        RingTag::Gaussian => {
            // Cornacchia
            let mut r0 = p;
            let mut r1 = sqrt_mod(p - 1, p).expect("-1 is a square mod p");
            let bound = isqrt(p);
            while r1 > bound {
                (r0, r1) = (r1, r0 % r1);
            }
            let y = isqrt(p - r1 * r1);
            Elem::new(r1 as i64, y as i64, ring)
        }
        RingTag::Sqrt2 => {
            let x = sqrt_mod(2, p).expect("2 is a square mod p");
            Elem::from_int(p as i64, ring).gcd_raw(&Elem::new(x as i64, -1, ring))
        }
    }
}
