//! Narrow class groups of quadratic discriminants from binary quadratic forms.

mod forms;
mod group;

pub use forms::{sqrt_floor, BQForm};
pub use group::ClassGroup;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factorize, omega};

/// Largest `|D|` accepted by default.
pub const DEFAULT_BOUND: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassGroupError {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("|D| = {0} exceeds the bound {1}")]
    BoundExceeded(u64, u64),
    #[error("2-rank {rk2} of D = {disc} differs from the genus count {expected}")]
    GenusTheoryViolation { disc: i64, rk2: u32, expected: u32 },
}

/// A finite abelian group as its invariant factors `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupStructure {
    pub discriminant: i64,
    pub elementary_divisors: Vec<u64>,
    pub order: u64,
}

impl ClassGroupStructure {
    /// `rk_{2^k}`: the number of cyclic factors of order divisible by `2^k`.
    pub fn two_power_rank(&self, k: u32) -> u32 {
        self.elementary_divisors
            .iter()
            .filter(|&&d| d % (1u64 << k) == 0)
            .count() as u32
    }

    pub fn rank_profile(&self) -> RankProfile {
        RankProfile {
            rk2: self.two_power_rank(1),
            rk4: self.two_power_rank(2),
            rk8: self.two_power_rank(3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankProfile {
    pub rk2: u32,
    pub rk4: u32,
    pub rk8: u32,
}

pub fn is_fundamental(disc: i64) -> bool {
    let squarefree = |n: u64| factorize(n).iter().all(|&(_, e)| e == 1);
    match disc.rem_euclid(4) {
        1 => disc != 1 && squarefree(disc.unsigned_abs()),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

fn check(disc: i64, bound: u64) -> Result<(), ClassGroupError> {
    if disc.unsigned_abs() > bound {
        return Err(ClassGroupError::BoundExceeded(disc.unsigned_abs(), bound));
    }
    if !is_fundamental(disc) {
        return Err(ClassGroupError::NotFundamental(disc));
    }
    Ok(())
}

/// The narrow class group of the fundamental discriminant `disc`.
pub fn narrow_class_group(disc: i64) -> Result<ClassGroupStructure, ClassGroupError> {
    narrow_class_group_bounded(disc, DEFAULT_BOUND)
}

pub fn narrow_class_group_bounded(
    disc: i64,
    bound: u64,
) -> Result<ClassGroupStructure, ClassGroupError> {
    check(disc, bound)?;
    Ok(ClassGroup::new(disc).structure())
}

/// 2-, 4- and 8-ranks, checked against genus theory.
pub fn rank_profile(disc: i64) -> Result<RankProfile, ClassGroupError> {
    let rp = narrow_class_group(disc)?.rank_profile();
    let expected = omega(disc.unsigned_abs()) as u32 - 1;
    if rp.rk2 != expected {
        return Err(ClassGroupError::GenusTheoryViolation {
            disc,
            rk2: rp.rk2,
            expected,
        });
    }
    Ok(rp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn divisors(d: i64) -> Vec<u64> {
        narrow_class_group(d).unwrap().elementary_divisors
    }

    #[test]
    fn examples() {
        let g = narrow_class_group(-20).unwrap();
        assert_eq!((g.order, g.elementary_divisors.clone()), (2, vec![2]));
        let g = narrow_class_group(-4).unwrap();
        assert_eq!((g.order, g.elementary_divisors.len()), (1, 0));
        assert_eq!(narrow_class_group(40).unwrap().order, 2);
        let rp = rank_profile(-6052).unwrap();
        assert_eq!((rp.rk2, rp.rk4), (2, 2));
        assert_eq!(
            rank_profile(-20).unwrap(),
            RankProfile { rk2: 1, rk4: 0, rk8: 0 }
        );
        assert!(rank_profile(-25988).unwrap().rk8 >= 1);
    }

    #[test]
    fn known_groups() {
        assert_eq!(divisors(-3), Vec::<u64>::new());
        assert_eq!(divisors(-23), vec![3]);
        assert_eq!(divisors(-56), vec![4]);
        assert_eq!(divisors(-84), vec![2, 2]);
        assert_eq!(divisors(-4 * 5 * 13), vec![2, 4]);
        assert_eq!(divisors(5), Vec::<u64>::new());
        assert_eq!(divisors(8), Vec::<u64>::new());
        assert_eq!(divisors(12), vec![2]);
        assert_eq!(divisors(60), vec![2, 2]);
        assert_eq!(divisors(136), vec![4]);
        assert_eq!(divisors(229), vec![3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(narrow_class_group(-16), Err(ClassGroupError::NotFundamental(-16)));
        assert_eq!(narrow_class_group(1), Err(ClassGroupError::NotFundamental(1)));
        assert_eq!(narrow_class_group(-7 * 9), Err(ClassGroupError::NotFundamental(-63)));
        assert!(matches!(
            narrow_class_group_bounded(-4 * 17 * 89, 1000),
            Err(ClassGroupError::BoundExceeded(..))
        ));
    }
}
