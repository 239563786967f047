//! Symbol-level criteria for `rk₄ = 2` and `rk₈ ≥ 1` of `CL(dpq)`.

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::arith::is_prime;
use crate::quadring::{in_square_class, split_prime, QuadError};
use crate::symbols::{
    chi2, chi_t, chi_t_congruence, jacobi, jacobi_u64, QrModulus, SymbolError, SymbolValue,
};
use crate::{Elem, RingTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("consistency violation: {0}")]
    ConsistencyViolation(String),
}

/// `rk₄ CL(dpq) = 2` iff `p ≡ q ≡ 1 (mod 8)` and `(p/q) = 1`.
pub fn rk4_is_two(p: u64, q: u64) -> Result<bool, CriteriaError> {
    if p == q || p % 4 != 1 || q % 4 != 1 {
        return Err(CriteriaError::BadInput(format!(
            "need distinct p, q = 1 mod 4, got ({p}, {q})"
        )));
    }
    Ok(p % 8 == 1 && q % 8 == 1 && jacobi_u64(p, q) == SymbolValue::ONE)
}

/// Everything known about the pair `(p, q)` in one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRecord {
    pub p: u64,
    pub q: u64,
    pub ring: RingTag,
    pub w: Elem,
    pub z: Elem,
    pub alpha: Elem,
    pub x: i64,
    pub y: i64,
    pub flag_pqcong: bool,
    pub flag_pqjac: bool,
    pub flag_square_mod4: bool,
    pub flag_split2: bool,
    pub flag_xpos: bool,
    pub chi_t_w: SymbolValue,
    pub chi_t_z: SymbolValue,
    /// `(ᾱ/(w))`.
    pub epsilon: SymbolValue,
    /// `(ᾱ/(z))`.
    pub epsilon_z: SymbolValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Prediction {
    Yes,
    No,
    Inapplicable,
}

impl PairRecord {
    /// Whether the rk₈ criterion applies: the prime above 2 splits and, for
    /// d = 8, `x > 0`.
    pub fn applicable(&self) -> bool {
        self.flag_split2 && (self.ring == RingTag::Gaussian || self.flag_xpos)
    }

    pub fn prediction(&self) -> Prediction {
        if !self.applicable() {
            Prediction::Inapplicable
        } else if self.epsilon == SymbolValue::ONE {
            Prediction::Yes
        } else {
            Prediction::No
        }
    }
}

#[derive(Serialize)]
struct FlatPairRecord {
    p: u64,
    q: u64,
    d: i64,
    w_a: i64,
    w_b: i64,
    z_a: i64,
    z_b: i64,
    x: i64,
    y: i64,
    flag_pqcong: bool,
    flag_pqjac: bool,
    flag_square_mod4: bool,
    flag_split2: bool,
    flag_xpos: bool,
    chi_t_w: SymbolValue,
    chi_t_z: SymbolValue,
    epsilon: SymbolValue,
    epsilon_z: SymbolValue,
    predicts_rk8: Prediction,
}

impl Serialize for PairRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FlatPairRecord {
            p: self.p,
            q: self.q,
            d: self.ring.d(),
            w_a: self.w.a,
            w_b: self.w.b,
            z_a: self.z.a,
            z_b: self.z.b,
            x: self.x,
            y: self.y,
            flag_pqcong: self.flag_pqcong,
            flag_pqjac: self.flag_pqjac,
            flag_square_mod4: self.flag_square_mod4,
            flag_split2: self.flag_split2,
            flag_xpos: self.flag_xpos,
            chi_t_w: self.chi_t_w,
            chi_t_z: self.chi_t_z,
            epsilon: self.epsilon,
            epsilon_z: self.epsilon_z,
            predicts_rk8: self.prediction(),
        }
        .serialize(s)
    }
}

/// The dossier of `(p, q)` built from the default generators.
pub fn build_pair(p: u64, q: u64, ring: RingTag) -> Result<PairRecord, CriteriaError> {
    if !is_prime(p) || !is_prime(q) {
        return Err(CriteriaError::BadInput(format!("({p}, {q}) are not both prime")));
    }
    if !rk4_is_two(p, q)? {
        return Err(CriteriaError::BadInput(format!("rk4(CL({}·{p}·{q})) < 2", ring.d())));
    }
    let w = split_prime(p, ring)?.value;
    let z = split_prime(q, ring)?.value;
    pair_from_generators(p, q, &w, &z)
}

/// The dossier of `(p, q)` for given generators `w` of norm `p` and `z` of
/// norm `q`, both squares modulo 4.
pub fn pair_from_generators(
    p: u64,
    q: u64,
    w: &Elem,
    z: &Elem,
) -> Result<PairRecord, CriteriaError> {
    let ring = w.ring;
    if w.norm() != p as i64 || z.norm() != q as i64 || !in_square_class(w) || !in_square_class(z)
    {
        return Err(CriteriaError::BadInput(format!(
            "generators {w}, {z} do not satisfy the norm and square-class conditions"
        )));
    }
    let alpha = w.checked_mul(z).ok_or(QuadError::Overflow)?;
    let (x, y) = (alpha.a, alpha.b);
    if alpha.norm_exact() != p as i128 * q as i128 {
        return Err(CriteriaError::ConsistencyViolation(format!("N({alpha}) != {p}·{q}")));
    }
    let chi_t_w = chi_t(w)?;
    let chi_t_z = chi_t(z)?;
    let split2 = chi_t_w * chi_t_z == SymbolValue::ONE;
    let split2_congruence = chi_t_congruence(&alpha)? == Some(SymbolValue::ONE);
    if split2 != split2_congruence {
        return Err(CriteriaError::ConsistencyViolation(format!(
            "split2 for ({p}, {q}, d={}): character product {split2}, congruence {split2_congruence}",
            ring.d()
        )));
    }
    let oalpha = alpha.conj();
    let epsilon = QrModulus::from_prime_generator(w).symbol(&oalpha);
    let epsilon_z = QrModulus::from_prime_generator(z).symbol(&oalpha);
    let rec = PairRecord {
        p,
        q,
        ring,
        w: *w,
        z: *z,
        alpha,
        x,
        y,
        flag_pqcong: p % 8 == 1 && q % 8 == 1,
        flag_pqjac: jacobi_u64(p, q) == SymbolValue::ONE,
        flag_square_mod4: in_square_class(&alpha),
        flag_split2: split2,
        flag_xpos: x > 0,
        chi_t_w,
        chi_t_z,
        epsilon,
        epsilon_z,
    };
    check_proven_identities(&rec)?;
    Ok(rec)
}

fn check_proven_identities(rec: &PairRecord) -> Result<(), CriteriaError> {
    let tag = format!("({}, {}, d={})", rec.p, rec.q, rec.ring.d());
    if !rec.flag_square_mod4 {
        return Err(CriteriaError::ConsistencyViolation(format!(
            "alpha not a square mod 4 for {tag}"
        )));
    }
    let must_agree = match rec.ring {
        RingTag::Gaussian => true,
        RingTag::Sqrt2 => rec.flag_split2 && rec.flag_xpos,
    };
    if must_agree && rec.epsilon != rec.epsilon_z {
        return Err(CriteriaError::ConsistencyViolation(format!(
            "(conj(alpha)/(w)) = {} but (conj(alpha)/(z)) = {} for {tag}",
            rec.epsilon, rec.epsilon_z
        )));
    }
    if rec.ring == RingTag::Sqrt2 && rec.flag_split2 {
        let pq16 = (rec.p as u128 * rec.q as u128) % 16 == 1;
        if rec.flag_xpos != pq16 {
            return Err(CriteriaError::ConsistencyViolation(format!(
                "x > 0 is {} but pq = 1 mod 16 is {pq16} for {tag}",
                rec.flag_xpos
            )));
        }
    }
    Ok(())
}

/// `ε(p, q)`, checking the two evaluations where they are proven equal.
pub fn epsilon(rec: &PairRecord) -> Result<SymbolValue, CriteriaError> {
    if rec.ring == RingTag::Sqrt2 && !rec.flag_xpos {
        return Err(CriteriaError::BadInput(format!(
            "epsilon for d=8 needs x > 0, got x = {}",
            rec.x
        )));
    }
    check_proven_identities(rec)?;
    Ok(rec.epsilon)
}

/// Three-state rk₈ prediction; `Yes` guarantees `rk₈ CL(dpq) ≥ 1`.
pub fn predicts_rk8(p: u64, q: u64, ring: RingTag) -> Result<Prediction, CriteriaError> {
    Ok(build_pair(p, q, ring)?.prediction())
}

/// Every generator of a prime of norm `p` above `p` that is a square modulo
/// 4, with unit exponents `(1+√2)^{2k}`, `|k| ≤ 2`, in Z[√2].
pub fn admissible_generators(p: u64, ring: RingTag) -> Result<Vec<Elem>, CriteriaError> {
    let w = split_prime(p, ring)?.value;
    let mut out = Vec::new();
    for g in [w, w.conj()] {
        match ring {
            RingTag::Gaussian => {
                for k in 0..4 {
                    let v = g * Elem::unit_power(ring, k);
                    if in_square_class(&v) {
                        out.push(v);
                    }
                }
            }
            RingTag::Sqrt2 => {
                for k in -2..=2 {
                    out.push(g * Elem::unit_power(ring, 2 * k));
                }
            }
        }
    }
    Ok(out)
}

/// `(𝐫, 𝐬, 𝐞)` of the indicator functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorConfig {
    pub r: (u64, u64),
    pub s: (i64, i64),
    pub e: (u8, u8),
}

impl IndicatorConfig {
    /// Cells `(𝐫, 𝐬)` with `s₁s₂ = 1`, and `r₁r₂ ≡ 1 (mod 16)` for d = 8.
    pub fn admissible_cells(ring: RingTag) -> Vec<((u64, u64), (i64, i64))> {
        let mut out = Vec::new();
        for r in [(1, 1), (1, 9), (9, 1), (9, 9)] {
            if ring == RingTag::Sqrt2 && (r.0 * r.1) % 16 != 1 {
                continue;
            }
            for s in [(1, 1), (-1, -1)] {
                out.push((r, s));
            }
        }
        out
    }

    pub fn is_admissible(&self, ring: RingTag) -> bool {
        Self::admissible_cells(ring).contains(&(self.r, self.s))
    }

    pub fn all_e() -> [(u8, u8); 4] {
        [(0, 0), (1, 0), (0, 1), (1, 1)]
    }
}

/// `c(p, q; 𝐫, 𝐬)`.
pub fn c_indicator(
    p: u64,
    q: u64,
    r: (u64, u64),
    s: (i64, i64),
    ring: RingTag,
) -> Result<bool, CriteriaError> {
    if p % 16 != r.0 || q % 16 != r.1 {
        return Ok(false);
    }
    Ok(chi2(p, ring)?.value() == s.0 && chi2(q, ring)?.value() == s.1)
}

/// `f(p, q; 𝐫, 𝐬, 𝐞) = c(p, q; 𝐫, 𝐬) · χ_p(q)^{e₁} · ε(p, q)^{e₂}`.
pub fn f_indicator(
    p: u64,
    q: u64,
    cfg: &IndicatorConfig,
    ring: RingTag,
) -> Result<SymbolValue, CriteriaError> {
    if p == q || !is_prime(p) || !is_prime(q) {
        return Err(CriteriaError::BadInput(format!("need distinct primes, got ({p}, {q})")));
    }
    if !c_indicator(p, q, cfg.r, cfg.s, ring)? {
        return Ok(SymbolValue::ZERO);
    }
    let chi_pq = jacobi(p as i64, q);
    let eps = if cfg.e.1 == 1 { pair_epsilon(p, q, ring)? } else { SymbolValue::ONE };
    Ok(chi_pq.pow(cfg.e.0 as u32) * eps)
}

/// `(ᾱ/(w))` for `p ≡ q ≡ 1 (mod 8)`, without the `(p/q) = 1` requirement.
pub fn pair_epsilon(p: u64, q: u64, ring: RingTag) -> Result<SymbolValue, CriteriaError> {
    let w = split_prime(p, ring)?.value;
    let z = split_prime(q, ring)?.value;
    let alpha = w.checked_mul(&z).ok_or(QuadError::Overflow)?;
    Ok(QrModulus::from_prime_generator(&w).symbol(&alpha.conj()))
}

/// Per-prime data for bulk evaluation: the default generator, the image of
/// `√d₀` modulo `(w)`, and `χ₂(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeData {
    pub p: u64,
    pub w: Elem,
    pub root: u64,
    pub chi2: SymbolValue,
}

impl PrimeData {
    /// Requires `p ≡ 1 (mod 8)`.
    pub fn new(p: u64, ring: RingTag) -> Result<Self, CriteriaError> {
        let w = split_prime(p, ring)?.value;
        let root = match QrModulus::from_prime_generator(&w).factors()[0].0 {
            crate::symbols::PrimeIdeal::Split { root, .. } => root,
            _ => unreachable!("degree-one prime"),
        };
        Ok(Self {
            p,
            w,
            root,
            chi2: chi2(p, ring)?,
        })
    }
}

/// `(ᾱ/(w))` from precomputed prime data, for `p ≡ q ≡ 1 (mod 8)`.
pub fn fast_epsilon(pd: &PrimeData, qd: &PrimeData) -> SymbolValue {
    let alpha = pd.w * qd.w;
    let p = pd.p as i128;
    let img = (alpha.a as i128 - alpha.b as i128 * pd.root as i128).rem_euclid(p);
    jacobi_u64(img as u64, pd.p)
}

/// `predicts_rk8` from precomputed prime data, for `p ≡ q ≡ 1 (mod 8)`
/// with `(p/q) = 1`.
pub fn fast_prediction(pd: &PrimeData, qd: &PrimeData, ring: RingTag) -> Prediction {
    let split2 = pd.chi2 * qd.chi2 == SymbolValue::ONE;
    if !split2 || (ring == RingTag::Sqrt2 && pd.w.a * qd.w.a + ring.d0() * pd.w.b * qd.w.b <= 0) {
        return Prediction::Inapplicable;
    }
    if fast_epsilon(pd, qd) == SymbolValue::ONE {
        Prediction::Yes
    } else {
        Prediction::No
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: RingTag = RingTag::Gaussian;
    const S: RingTag = RingTag::Sqrt2;

    #[test]
    fn rk4_examples() {
        assert_eq!(rk4_is_two(17, 89), Ok(true));
        assert_eq!(rk4_is_two(5, 13), Ok(false));
        assert_eq!(rk4_is_two(17, 41), Ok(false));
        assert!(matches!(rk4_is_two(17, 17), Err(CriteriaError::BadInput(_))));
        assert!(matches!(rk4_is_two(7, 17), Err(CriteriaError::BadInput(_))));
    }

    #[test]
    fn build_pair_examples() {
        let r = build_pair(17, 89, G).unwrap();
        assert_eq!((r.alpha, r.x), (Elem::new(-27, 28, G), -27));
        assert!(r.flag_split2);
        assert_eq!(r.epsilon, SymbolValue::MINUS_ONE);
        assert_eq!(r.prediction(), Prediction::No);

        let r = build_pair(17, 89, S).unwrap();
        assert_eq!(r.alpha, Elem::new(71, 42, S));
        assert!(!r.flag_split2);
        assert!(r.flag_xpos);
        assert_eq!((r.chi_t_w, r.chi_t_z), (SymbolValue::MINUS_ONE, SymbolValue::ONE));
        assert_eq!((17 * 89) % 16, 9);
        assert_eq!(r.prediction(), Prediction::Inapplicable);

        let r = build_pair(73, 89, G).unwrap();
        assert_eq!(r.alpha, Elem::new(-49, 64, G));
        assert_eq!(epsilon(&r), Ok(SymbolValue::ONE));
        assert_eq!(r.epsilon_z, SymbolValue::ONE);
        assert_eq!(predicts_rk8(73, 89, G), Ok(Prediction::Yes));

        for rec in [build_pair(17, 89, G).unwrap(), build_pair(73, 89, S).unwrap()] {
            let (x, y) = (rec.x as i128, rec.y as i128);
            assert_eq!(x * x - rec.ring.d0() as i128 * y * y, (rec.p * rec.q) as i128);
        }
    }

    #[test]
    fn rejects_pairs_without_full_4_rank() {
        assert!(matches!(build_pair(17, 41, G), Err(CriteriaError::BadInput(_))));
        assert!(matches!(build_pair(17, 91, G), Err(CriteriaError::BadInput(_))));
    }

    #[test]
    fn indicator_examples() {
        let f = |r, s, e| {
            f_indicator(17, 89, &IndicatorConfig { r, s, e }, G).unwrap().value()
        };
        assert_eq!(f((1, 9), (-1, -1), (1, 0)), 1);
        assert_eq!(f((1, 9), (-1, 1), (1, 1)), 0);
        assert_eq!(f((1, 9), (-1, -1), (1, 1)), -1);
        assert_eq!(f((1, 9), (-1, -1), (0, 0)), 1);
        assert_eq!(f((9, 9), (-1, -1), (0, 0)), 0);
    }

    #[test]
    fn admissible_cells() {
        assert_eq!(IndicatorConfig::admissible_cells(G).len(), 8);
        assert_eq!(IndicatorConfig::admissible_cells(S).len(), 4);
        let cfg = IndicatorConfig { r: (1, 9), s: (1, 1), e: (0, 0) };
        assert!(cfg.is_admissible(G));
        assert!(!cfg.is_admissible(S));
    }

    #[test]
    fn fast_path_matches_records() {
        let primes: Vec<u64> =
            crate::sieve::primes_up_to(1500).into_iter().filter(|p| p % 8 == 1).collect();
        for ring in RingTag::ALL {
            let data: Vec<PrimeData> = primes.iter().map(|&p| PrimeData::new(p, ring).unwrap()).collect();
            for (i, pd) in data.iter().enumerate() {
                for qd in &data[i + 1..] {
                    if rk4_is_two(pd.p, qd.p).unwrap() {
                        assert_eq!(
                            fast_prediction(pd, qd, ring),
                            predicts_rk8(pd.p, qd.p, ring).unwrap(),
                            "({}, {})",
                            pd.p,
                            qd.p
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn record_json_is_flat() {
        let v = serde_json::to_value(build_pair(73, 89, G).unwrap()).unwrap();
        assert_eq!(v["epsilon"], 1);
        assert_eq!(v["predicts_rk8"], "Yes");
        assert_eq!(v["d"], -4);
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object()));
    }
}
