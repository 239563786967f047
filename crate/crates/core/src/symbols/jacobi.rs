use super::SymbolValue;

/// Jacobi symbol `(n/m)` for odd `m ≥ 1`.
pub fn jacobi(n: i64, m: u64) -> SymbolValue {
    jacobi_u64((n as i128).rem_euclid(m as i128) as u64, m)
}

/// Jacobi symbol by the binary algorithm.
pub fn jacobi_u64(mut n: u64, mut m: u64) -> SymbolValue {
    assert!(m % 2 == 1, "Jacobi modulus must be odd");
    n %= m;
    let mut sign = 1i8;
    while n != 0 {
        let tz = n.trailing_zeros();
        n >>= tz;
        if tz % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            sign = -sign;
        }
        if n % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        (n, m) = (m % n, n);
    }
    if m == 1 {
        SymbolValue::new(sign as i64)
    } else {
        SymbolValue::ZERO
    }
}
