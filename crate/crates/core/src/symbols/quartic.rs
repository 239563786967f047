use super::{jacobi_u64, SymbolValue};
use crate::arith::mod_pow;

/// `[2, p]₄`: 1 if 2 is a fourth power mod `p`, −1 if a square but not a
/// fourth power, 0 otherwise.
pub fn quartic_2_p(p: u64) -> SymbolValue {
    if jacobi_u64(2, p) != SymbolValue::ONE {
        return SymbolValue::ZERO;
    }
    if p % 4 == 3 {
        // every square is a fourth power
        return SymbolValue::ONE;
    }
    SymbolValue::from_bool(mod_pow(2, (p - 1) / 4, p) == 1)
}

/// `[2, p]₄` by listing the fourth powers modulo `p`.
pub fn quartic_2_p_enumerate(p: u64) -> SymbolValue {
    let fourth = (1..p).any(|x| mod_pow(x, 4, p) == 2 % p);
    let square = (1..p).any(|x| x * x % p == 2 % p);
    if fourth {
        SymbolValue::ONE
    } else if square {
        SymbolValue::MINUS_ONE
    } else {
        SymbolValue::ZERO
    }
}

/// `[n, 2]₄` from `n mod 16`.
pub fn quartic_pq_2(n: u64) -> SymbolValue {
    match n % 16 {
        1 => SymbolValue::ONE,
        9 => SymbolValue::MINUS_ONE,
        _ => SymbolValue::ZERO,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(quartic_2_p(17), SymbolValue::MINUS_ONE);
        assert_eq!(quartic_2_p(73), SymbolValue::ONE);
        assert_eq!(quartic_2_p(89), SymbolValue::ONE);
        assert_eq!(quartic_2_p(5), SymbolValue::ZERO);
        assert_eq!(quartic_pq_2(1513), SymbolValue::MINUS_ONE);
        assert_eq!(quartic_pq_2(17 * 113), SymbolValue::ONE);
        assert_eq!(quartic_pq_2(15), SymbolValue::ZERO);
    }

    #[test]
    fn power_test_matches_enumeration() {
        for p in crate::sieve::primes_up_to(3000).into_iter().skip(1) {
            assert_eq!(quartic_2_p(p), quartic_2_p_enumerate(p), "p={p}");
        }
    }
}
