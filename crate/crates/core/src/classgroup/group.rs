use std::collections::HashMap;

use super::forms::{sqrt_floor, BQForm};
use super::ClassGroupStructure;
use crate::arith::factorize;

/// The classes of primitive forms of one discriminant, with composition.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    disc: i64,
    sqrt_floor: i64,
    reps: Vec<BQForm>,
    /// Every reduced form, mapped to its class.
    lookup: HashMap<BQForm, usize>,
    identity: usize,
}

impl ClassGroup {
    pub fn new(disc: i64) -> Self {
        if disc < 0 {
            Self::definite(disc)
        } else {
            Self::indefinite(disc)
        }
    }

    fn definite(disc: i64) -> Self {
        let mut reps = Vec::new();
        let n = disc.unsigned_abs() as i64;
        let mut a = 1i64;
        while 3 * a * a <= n {
            let start = if (a + disc).rem_euclid(2) == 0 { -a } else { -a + 1 };
            let mut b = start;
            while b <= a {
                let num = b * b - disc;
                if num % (4 * a) == 0 {
                    let f = BQForm::new(a, b, num / (4 * a));
                    if f.c >= a && f.is_reduced_definite() && f.is_primitive() {
                        reps.push(f);
                    }
                }
                b += 2;
            }
            a += 1;
        }
        let lookup = reps.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut g = Self {
            disc,
            sqrt_floor: 0,
            reps,
            lookup,
            identity: 0,
        };
        g.identity = g.class_of(&BQForm::principal(disc));
        g
    }

    fn indefinite(disc: i64) -> Self {
        let s = sqrt_floor(disc);
        let mut reduced = Vec::new();
        let mut b = if (s - disc).rem_euclid(2) == 0 { s } else { s - 1 };
        while b > 0 {
            let n = (disc - b * b) / 4;
            let lo = ((s - b) / 2 + 1).max(1);
            let hi = (s + b) / 2;
            for a in lo..=hi {
                if n % a == 0 {
                    for f in [BQForm::new(a, b, -n / a), BQForm::new(-a, b, n / a)] {
                        if f.is_primitive() {
                            reduced.push(f);
                        }
                    }
                }
            }
            b -= 2;
        }
        let mut lookup = HashMap::with_capacity(reduced.len());
        let mut reps = Vec::new();
        for f in reduced {
            if lookup.contains_key(&f) {
                continue;
            }
            let id = reps.len();
            reps.push(f);
            let mut g = f;
            loop {
                lookup.insert(g, id);
                g = g.rho(disc, s);
                if g == f {
                    break;
                }
            }
        }
        let mut g = Self {
            disc,
            sqrt_floor: s,
            reps,
            lookup,
            identity: 0,
        };
        g.identity = g.class_of(&BQForm::principal(disc));
        g
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn representative(&self, i: usize) -> BQForm {
        self.reps[i]
    }

    /// The class of any primitive form of this discriminant.
    pub fn class_of(&self, f: &BQForm) -> usize {
        let r = if self.disc < 0 {
            f.reduce_definite()
        } else {
            f.reduce_indefinite(self.disc, self.sqrt_floor)
        };
        self.lookup[&r]
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.class_of(&self.reps[i].compose(&self.reps[j]))
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.class_of(&self.reps[i].inverse())
    }

    pub fn pow(&self, i: usize, mut e: u64) -> usize {
        let mut acc = self.identity;
        let mut base = i;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose(acc, base);
            }
            base = self.compose(base, base);
            e >>= 1;
        }
        acc
    }

    /// Invariant factors, from the sizes of the `ℓ^j`-torsion subgroups.
    pub fn structure(&self) -> ClassGroupStructure {
        let h = self.order() as u64;
        // per prime: multiplicities of exponents
        let mut prime_powers: Vec<Vec<u64>> = Vec::new();
        for (l, _) in factorize(h) {
            let mut current: Vec<usize> = (0..self.order()).collect();
            let mut prev_count = 1u64;
            let mut at_least = Vec::new();
            loop {
                current = current.iter().map(|&x| self.pow(x, l)).collect();
                let count = current.iter().filter(|&&x| x == self.identity).count() as u64;
                if count == prev_count {
                    break;
                }
                let mut ratio = count / prev_count;
                let mut r = 0;
                while ratio > 1 {
                    ratio /= l;
                    r += 1;
                }
                at_least.push(r);
                prev_count = count;
            }
            // at_least[j] = #{cyclic ℓ-factors of order ≥ ℓ^{j+1}}
            let mut powers = Vec::new();
            for (j, &n) in at_least.iter().enumerate() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..(n - next) {
                    powers.push(l.pow(j as u32 + 1));
                }
            }
            powers.sort_unstable_by(|a, b| b.cmp(a));
            prime_powers.push(powers);
        }
        let len = prime_powers.iter().map(Vec::len).max().unwrap_or(0);
        let mut divisors: Vec<u64> = (0..len)
            .map(|i| prime_powers.iter().filter_map(|p| p.get(i)).product())
            .collect();
        divisors.reverse();
        ClassGroupStructure {
            discriminant: self.disc,
            elementary_divisors: divisors,
            order: h,
        }
    }
}
