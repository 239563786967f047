use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CharSumError;
use crate::quadring::{in_domain, normalize_generator, Convention};
use crate::symbols::{Gamma, SymbolValue};
use crate::{Elem, RingTag};

/// Minimum number of nonzero pairs examined per class tuple.
pub const DELTA_MIN_SAMPLES: usize = 1000;

/// `(w mod 8, z mod 8, sign(w₁), sign(z₁))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeltaClass {
    pub w_mod8: (u8, u8),
    pub z_mod8: (u8, u8),
    pub w_sign: i8,
    pub z_sign: i8,
}

/// Coordinates modulo 8 and the sign of the rational part.
pub fn sign_class(w: &Elem) -> ((u8, u8), i8) {
    (
        (w.a.rem_euclid(8) as u8, w.b.rem_euclid(8) as u8),
        w.a.signum() as i8,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub delta: SymbolValue,
    pub samples: usize,
}

/// `δ` with `γ(w, z) = δ·γ(z, w)` on each class tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaTable {
    pub ring: RingTag,
    pub entries: BTreeMap<DeltaClass, DeltaEntry>,
}

impl DeltaTable {
    pub fn get(&self, w: &Elem, z: &Elem) -> Option<SymbolValue> {
        let ((wm, ws), (zm, zs)) = (sign_class(w), sign_class(z));
        let key = DeltaClass {
            w_mod8: wm,
            z_mod8: zm,
            w_sign: ws,
            z_sign: zs,
        };
        self.entries.get(&key).map(|e| e.delta)
    }

    pub fn min_samples(&self) -> usize {
        self.entries.values().map(|e| e.samples).min().unwrap_or(0)
    }
}

fn admissible(w: &Elem) -> bool {
    if !w.is_primitive() || w.norm().rem_euclid(8) != 1 {
        return false;
    }
    match w.ring {
        RingTag::Gaussian => normalize_generator(w, Convention::PrimaryZi).is_ok_and(|g| g.value == *w),
        RingTag::Sqrt2 => in_domain(w) || in_domain(&-w),
    }
}

/// The smallest-norm admissible elements, `per_class` of each sign class.
fn pools(ring: RingTag, per_class: usize) -> Vec<Elem> {
    let mut radius = 32i64;
    loop {
        let mut cands: Vec<Elem> = (-radius..=radius)
            .flat_map(|a| (-radius..=radius).map(move |b| Elem::new(a, b, ring)))
            .filter(admissible)
            .collect();
        cands.sort_by_key(|w| (w.norm(), w.a, w.b));
        let mut by_class: BTreeMap<((u8, u8), i8), Vec<Elem>> = BTreeMap::new();
        for w in cands {
            let v = by_class.entry(sign_class(&w)).or_default();
            if v.len() < per_class {
                v.push(w);
            }
        }
        let expected = match ring {
            RingTag::Gaussian => 8,
            RingTag::Sqrt2 => 32,
        };
        if by_class.len() == expected && by_class.values().all(|v| v.len() == per_class) {
            return by_class.into_values().flatten().collect();
        }
        radius *= 2;
    }
}

/// Builds the table from every pair of a fixed pool of primitive elements
/// of norm `≡ 1 (mod 8)` (primary in Z[i]; `±` the sector in Z[√2]) and
/// checks that `γ(w, z)γ(z, w)` is constant on each class tuple.
pub fn delta_table(ring: RingTag) -> Result<DeltaTable, CharSumError> {
    let pool = pools(ring, 40);
    let gammas: Vec<Gamma> = pool.iter().map(Gamma::new).collect::<Result<_, _>>()?;
    let per_w: Vec<BTreeMap<DeltaClass, (i64, i64, usize)>> = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            let mut m: BTreeMap<DeltaClass, (i64, i64, usize)> = BTreeMap::new();
            let (wm, ws) = sign_class(&pool[i]);
            for (j, z) in pool.iter().enumerate() {
                let d = gammas[i].eval(z) * gammas[j].eval(&pool[i]);
                if d.is_zero() {
                    continue;
                }
                let (zm, zs) = sign_class(z);
                let key = DeltaClass {
                    w_mod8: wm,
                    z_mod8: zm,
                    w_sign: ws,
                    z_sign: zs,
                };
                let e = m.entry(key).or_insert((0, 0, 0));
                if d == SymbolValue::ONE {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
                e.2 += 1;
            }
            m
        })
        .collect();
    let mut merged: BTreeMap<DeltaClass, (i64, i64, usize)> = BTreeMap::new();
    for m in per_w {
        for (k, (p, n, c)) in m {
            let e = merged.entry(k).or_insert((0, 0, 0));
            e.0 += p;
            e.1 += n;
            e.2 += c;
        }
    }
    let mut entries = BTreeMap::new();
    for (k, (plus, minus, samples)) in merged {
        if plus > 0 && minus > 0 {
            return Err(CharSumError::NonConstantClass(format!("{k:?}: {plus} (+1), {minus} (-1)")));
        }
        let delta = if plus > 0 { SymbolValue::ONE } else { SymbolValue::MINUS_ONE };
        entries.insert(k, DeltaEntry { delta, samples });
    }
    Ok(DeltaTable { ring, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::jacobi;

    #[test]
    fn gaussian_delta_is_trivial() {
        let t = delta_table(RingTag::Gaussian).unwrap();
        assert_eq!(t.entries.len(), 64);
        assert!(t.entries.values().all(|e| e.delta == SymbolValue::ONE));
        assert!(t.min_samples() >= DELTA_MIN_SAMPLES);
    }

    #[test]
    fn sqrt2_delta_is_mu_of_the_product() {
        let t = delta_table(RingTag::Sqrt2).unwrap();
        assert_eq!(t.entries.len(), 32 * 32);
        assert!(t.min_samples() >= DELTA_MIN_SAMPLES);
        let mut minus = 0;
        for (k, e) in &t.entries {
            let (w1, w2) = (k.w_mod8.0 as i64, k.w_mod8.1 as i64);
            let (z1, z2) = (k.z_mod8.0 as i64, k.z_mod8.1 as i64);
            let a = (w1 * z1 + 2 * w2 * z2).rem_euclid(8);
            let sign = (k.w_sign * k.z_sign) as i64;
            let abs_a = if sign > 0 { a } else { (8 - a) % 8 };
            let expected = jacobi(-2, abs_a as u64);
            assert_eq!(e.delta, expected, "{k:?}");
            if matches!(abs_a, 1 | 3) {
                assert_eq!(e.delta, SymbolValue::ONE);
            }
            minus += (e.delta == SymbolValue::MINUS_ONE) as usize;
        }
        assert_eq!(minus, 512);
    }
}
