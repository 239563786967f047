//! Segmented sieve of Eratosthenes.

use std::sync::OnceLock;

const SEGMENT: u64 = 1 << 16;

/// Primes in the half-open range `[lo, hi)`, produced segment by segment.
pub struct SegmentedSieve {
    base: Vec<u64>,
    next: u64,
    hi: u64,
    buf: Vec<u64>,
    pos: usize,
}

impl SegmentedSieve {
    pub fn new(lo: u64, hi: u64) -> Self {
        let root = crate::arith::isqrt(hi.saturating_sub(1)) + 1;
        Self {
            base: simple_sieve(root),
            next: lo.max(2),
            hi,
            buf: Vec::new(),
            pos: 0,
        }
    }

    fn fill(&mut self) -> bool {
        while self.next < self.hi {
            let lo = self.next;
            let hi = (lo + SEGMENT).min(self.hi);
            self.next = hi;
            let mut composite = vec![false; (hi - lo) as usize];
            for &p in &self.base {
                if p * p >= hi {
                    break;
                }
                let start = (lo.div_ceil(p) * p).max(p * p);
                let mut m = start;
                while m < hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            self.buf.clear();
            self.pos = 0;
            self.buf.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| lo + i as u64),
            );
            if !self.buf.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for SegmentedSieve {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buf.len() && !self.fill() {
            return None;
        }
        let p = self.buf[self.pos];
        self.pos += 1;
        Some(p)
    }
}

fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// All primes `p <= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    SegmentedSieve::new(2, n + 1).collect()
}

pub(crate) const SMALL_PRIME_BOUND: u64 = 1 << 20;

/// Primes below 2^20, computed once.
pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| simple_sieve(SMALL_PRIME_BOUND))
}
