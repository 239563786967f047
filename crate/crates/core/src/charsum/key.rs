use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CharSumError;
use crate::arith::{euler_phi, is_square};
use crate::quadring::ResidueRing;
use crate::symbols::{jacobi_u64, Gamma};
use crate::{Elem, RingTag};

/// Largest residue grid `Z[√d₀]/(W)` (of size `W²`) enumerated directly.
pub const FULL_GRID_LIMIT: u128 = 1 << 24;
/// Largest period `W` for the reduced enumeration.
pub const PERIOD_LIMIT: u128 = 1 << 30;

/// `Σ_{z mod W} γ(w₁, z)γ(w₂, z)` against its closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSumResult {
    pub w1: Elem,
    pub w2: Elem,
    #[serde(rename = "W")]
    pub big_w: u64,
    pub r: u64,
    pub measured: i64,
    pub predicted_abs: u64,
}

impl CharSumResult {
    pub fn holds(&self) -> bool {
        self.measured.unsigned_abs() == self.predicted_abs
    }
}

/// `(W, r, W·φ(r)·φ(W/r))` when `W` and `r` are squares, else `(W, r, 0)`.
pub fn predicted_abs(w1: &Elem, w2: &Elem) -> Result<(u64, u64, u64), CharSumError> {
    let big_w = w1.norm_exact().unsigned_abs() * w2.norm_exact().unsigned_abs();
    let big_w = u64::try_from(big_w).map_err(|_| CharSumError::BoundExceeded(big_w))?;
    let r = Elem::gcd_ideal(w1, &w2.conj()).norm_exact().unsigned_abs() as u64;
    let pred = if is_square(big_w) && is_square(r) {
        big_w as u128 * euler_phi(r) as u128 * euler_phi(big_w / r) as u128
    } else {
        0
    };
    let pred = u64::try_from(pred).map_err(|_| CharSumError::BoundExceeded(pred))?;
    Ok((big_w, r, pred))
}

fn check_primitive(w: &Elem) -> Result<(), CharSumError> {
    if w.is_primitive() {
        Ok(())
    } else {
        Err(CharSumError::NotPrimitive(w.to_string()))
    }
}

/// Values of `z ↦ γ(w, z)` for primitive `w`, indexed by the image of `z̄`
/// in `Z/N(w)`.
struct GammaTable {
    n: u64,
    root: u64,
    values: Vec<i8>,
}

impl GammaTable {
    fn new(w: &Elem) -> Result<Self, CharSumError> {
        let res = ResidueRing::new(w)?;
        let n = res.len() as u64;
        let root = res.root_image().expect("primitive modulus");
        let mu = Gamma::new(w)?.mu().value() as i8;
        let values = (0..n).map(|k| mu * jacobi_u64(k, n).value() as i8).collect();
        Ok(Self { n, root, values })
    }

    /// `γ(w, x + y√d₀)`: `z̄ = x − y√d₀` maps to `x − y·root`.
    fn eval(&self, x: u64, y: u64) -> i8 {
        let n = self.n as u128;
        let img = (x as u128 % n + n - (y as u128 % n) * self.root as u128 % n) % n;
        self.values[img as usize]
    }
}

/// The key sum, using that `γ(w, z)` depends only on `z` modulo `(w̄)`: the
/// sum over `Z[√d₀]/(W)` is `W` times the sum over `Z[√d₀]/(w̄₁w̄₂)`.
pub fn key_cancellation_sum(w1: &Elem, w2: &Elem) -> Result<CharSumResult, CharSumError> {
    check_primitive(w1)?;
    check_primitive(w2)?;
    let (big_w, r, pred) = predicted_abs(w1, w2)?;
    if big_w as u128 > PERIOD_LIMIT {
        return Err(CharSumError::BoundExceeded(big_w as u128));
    }
    let modulus = w1.conj().checked_mul(&w2.conj()).ok_or(crate::QuadError::Overflow)?;
    let res = ResidueRing::new(&modulus)?;
    let (e, c) = res.dims();
    let (t1, t2) = (GammaTable::new(w1)?, GammaTable::new(w2)?);
    let sum: i64 = (0..c)
        .into_par_iter()
        .map(|y| {
            (0..e)
                .map(|x| (t1.eval(x, y) * t2.eval(x, y)) as i64)
                .sum::<i64>()
        })
        .sum();
    Ok(CharSumResult {
        w1: *w1,
        w2: *w2,
        big_w,
        r,
        measured: sum * big_w as i64,
        predicted_abs: pred,
    })
}

/// The key sum by direct enumeration of all `W²` residues modulo `W`.
pub fn key_cancellation_sum_full(w1: &Elem, w2: &Elem) -> Result<CharSumResult, CharSumError> {
    check_primitive(w1)?;
    check_primitive(w2)?;
    let (big_w, r, pred) = predicted_abs(w1, w2)?;
    let grid = big_w as u128 * big_w as u128;
    if grid > FULL_GRID_LIMIT {
        return Err(CharSumError::BoundExceeded(grid));
    }
    let (g1, g2) = (Gamma::new(w1)?, Gamma::new(w2)?);
    let ring = w1.ring;
    let bw = big_w as i64;
    let measured: i64 = (0..bw)
        .into_par_iter()
        .map(|y| {
            (0..bw)
                .map(|x| {
                    let z = Elem::new(x, y, ring);
                    (g1.eval(&z) * g2.eval(&z)).value()
                })
                .sum::<i64>()
        })
        .sum();
    Ok(CharSumResult {
        w1: *w1,
        w2: *w2,
        big_w,
        r,
        measured,
        predicted_abs: pred,
    })
}

/// Checks on random residues that `γ(wᵢ, z)` is unchanged by adding
/// multiples of `w̄₁w̄₂`; returns the number of disagreements.
pub fn periodicity_smoke<R: Rng>(
    w1: &Elem,
    w2: &Elem,
    samples: usize,
    rng: &mut R,
) -> Result<usize, CharSumError> {
    let modulus = w1.conj().checked_mul(&w2.conj()).ok_or(crate::QuadError::Overflow)?;
    let (g1, g2) = (Gamma::new(w1)?, Gamma::new(w2)?);
    let ring = w1.ring;
    let mut bad = 0;
    for _ in 0..samples {
        let z = Elem::new(rng.gen_range(-1000..1000), rng.gen_range(-1000..1000), ring);
        let t = Elem::new(rng.gen_range(-50..50), rng.gen_range(-50..50), ring);
        let shifted = z + (t * modulus);
        if g1.eval(&z) != g1.eval(&shifted) || g2.eval(&z) != g2.eval(&shifted) {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Canonical generators of the primitive ideals of norm at most `max_norm`,
/// sorted by norm and then coordinates.
pub fn primitive_ideals(ring: RingTag, max_norm: u64) -> Vec<Elem> {
    let bound = max_norm as i64;
    let mut out = Vec::new();
    match ring {
        RingTag::Gaussian => {
            let r = crate::arith::isqrt(max_norm) as i64;
            for a in 1..=r {
                for b in 0..=r {
                    let w = Elem::new(a, b, ring);
                    if w.norm() <= bound && w.is_primitive() {
                        out.push(w);
                    }
                }
            }
        }
        RingTag::Sqrt2 => {
            let umax = crate::arith::isqrt(2 * max_norm) as i64;
            for u in 1..=umax {
                for v in (-u / 2)..=(u / 2) {
                    let w = Elem::new(u, v, ring);
                    if crate::quadring::in_domain(&w) && w.norm() <= bound && w.is_primitive() {
                        out.push(w);
                    }
                }
            }
        }
    }
    out.sort_by_key(|w| (w.norm(), w.a, w.b));
    out
}
