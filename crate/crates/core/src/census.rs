//! Enumeration of pairs `p < q` under the hyperbola `pq ≤ X` and the
//! densities attached to them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::isqrt;
use crate::classgroup::rank_profile;
use crate::criteria::{
    c_indicator, f_indicator, fast_epsilon, fast_prediction, pair_epsilon, rk4_is_two,
    CriteriaError, IndicatorConfig, Prediction, PrimeData,
};
use crate::sieve::{primes_up_to, SegmentedSieve};
use crate::symbols::{jacobi_u64, SymbolValue};
use crate::{Rational, RingTag};

/// Default upper bound on `X`.
pub const DEFAULT_XMAX_CAP: u64 = 100_000_000;
/// Default bound on `pq` for the class-group cross-check.
pub const DEFAULT_ORACLE_CUTOFF: u64 = 20_000;

/// Pairs of distinct odd primes `p < q` with `pq ≤ x` accepted by
/// `filter`, ordered by `p` then `q`.
pub fn enumerate_pairs<F>(x: u64, filter: F) -> Vec<(u64, u64)>
where
    F: Fn(u64, u64) -> bool + Sync,
{
    if x < 6 {
        return Vec::new();
    }
    let small: Vec<u64> = primes_up_to(isqrt(x)).into_iter().filter(|&p| p > 2).collect();
    small
        .par_iter()
        .map(|&p| {
            SegmentedSieve::new(p + 1, x / p + 1)
                .filter(|&q| filter(p, q))
                .map(|q| (p, q))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Filter `p ≡ q ≡ 1 (mod 4)`.
pub fn mod4_filter(p: u64, q: u64) -> bool {
    p % 4 == 1 && q % 4 == 1
}

/// Filter `rk₄ CL(dpq) = 2`.
pub fn rk4_filter(p: u64, q: u64) -> bool {
    mod4_filter(p, q) && rk4_is_two(p, q).unwrap_or(false)
}

/// `X·log log X / log X`.
pub fn density_scale(x: u64) -> f64 {
    let lx = (x as f64).ln();
    x as f64 * lx.ln() / lx
}

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Counters at one checkpoint `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    #[serde(rename = "X")]
    pub x: u64,
    pub n_pairs_mod4: u64,
    pub n_rk4_2: u64,
    pub n_pred_yes: u64,
    /// Pairs whose class group has `rk₄ = 2` and `rk₈ ≥ 1`.
    pub n_oracle_rk8: Option<u64>,
    pub n_oracle_rk4_2: Option<u64>,
    /// Pairs predicted `Yes` whose class group has `rk₈ = 0`.
    pub n_oracle_violations: Option<u64>,
    /// `n_pred_yes / n_rk4_2`.
    pub ratio_pred: Option<f64>,
    /// `n_rk4_2 / (X log log X / log X)`.
    pub ratio_vs_scale: f64,
}

/// Counts for one cell `(𝐫, 𝐬)` at `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCount {
    pub r: (u64, u64),
    pub s: (i64, i64),
    /// `#{(p, q) ≡ 𝐫 (mod 16), (χ₂(p), χ₂(q)) = 𝐬}`.
    pub n_cell: u64,
    /// The above with `(p/q) = 1` and `ε(p, q) = 1`.
    pub n_constrained: u64,
    /// `Σ f(p, q; 𝐫, 𝐬, 𝐞)` for `𝐞 = (0,0), (1,0), (0,1), (1,1)`.
    pub sum_f: [i64; 4],
    /// `4·n_constrained = Σ_𝐞 Σ f`.
    pub decomposition_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub ring: RingTag,
    pub x_max: u64,
    pub checkpoints: u32,
    pub oracle_cutoff: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ratio_pred_band: (f64, f64),
    pub scale_target: f64,
    pub scale_factor: f64,
}

impl Tolerances {
    pub fn for_ring(ring: RingTag) -> Self {
        let band = match ring {
            RingTag::Gaussian => (0.20, 0.30),
            RingTag::Sqrt2 => (0.08, 0.17),
        };
        Self {
            ratio_pred_band: band,
            scale_target: 1.0 / 32.0,
            scale_factor: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub config: CensusConfig,
    pub rows: Vec<CensusRow>,
    pub cells: Vec<CellCount>,
    pub cl_weights: ClWeights,
    #[serde(serialize_with = "ser_ratio")]
    pub main_theorem_bound: Rational,
    pub tolerances: Tolerances,
}

impl CensusReport {
    /// Violations of the exact invariants: counter ordering and monotonicity,
    /// agreement with the oracle, and the decomposition identity.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !(r.n_pred_yes <= r.n_rk4_2 && r.n_rk4_2 <= r.n_pairs_mod4) {
                out.push(format!("census X={}: counters out of order", r.x));
            }
            if r.n_oracle_violations.is_some_and(|v| v > 0) {
                out.push(format!(
                    "algebra X={}: {} pairs predicted Yes with rk8 = 0",
                    r.x,
                    r.n_oracle_violations.unwrap_or(0)
                ));
            }
            if r.n_oracle_rk4_2.is_some_and(|v| v != r.n_rk4_2) {
                out.push(format!(
                    "prop4rank X={}: oracle counts {:?} pairs with rk4 = 2, criterion {}",
                    r.x, r.n_oracle_rk4_2, r.n_rk4_2
                ));
            }
        }
        for w in self.rows.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.n_pairs_mod4 < a.n_pairs_mod4 || b.n_rk4_2 < a.n_rk4_2 || b.n_pred_yes < a.n_pred_yes {
                out.push(format!("census: counters decrease between X={} and X={}", a.x, b.x));
            }
        }
        for c in self.cells.iter().filter(|c| !c.decomposition_holds) {
            out.push(format!(
                "decomposition: cell r={:?} s={:?}: 4·{} vs {:?}",
                c.r, c.s, c.n_constrained, c.sum_f
            ));
        }
        out
    }
}

struct PairFacts {
    pq: u64,
    p16: u64,
    q16: u64,
    chi2: (i64, i64),
    jac: i64,
    eps: i64,
    pred: Prediction,
}

/// Counters for `p ≡ q ≡ 1 (mod 4)`, `pq ≤ X`, at `checkpoints` evenly spaced
/// values of `X`; the class-group oracle fills the optional columns for
/// `X ≤ oracle_cutoff`. Output is independent of the number of threads.
pub fn run_census(cfg: &CensusConfig) -> Result<CensusReport, CriteriaError> {
    let ring = cfg.ring;
    let x_max = cfg.x_max;
    if x_max < 6 || cfg.checkpoints == 0 {
        return Err(CriteriaError::BadInput(format!(
            "need X >= 6 and at least one checkpoint, got X = {x_max}, {} checkpoints",
            cfg.checkpoints
        )));
    }
    let k = cfg.checkpoints as u64;
    let xs: Vec<u64> = (1..=k).map(|i| (x_max as u128 * i as u128 / k as u128) as u64).collect();
    let bucket = |pq: u64| xs.partition_point(|&x| x < pq);

    let mod4: Vec<u64> = SegmentedSieve::new(5, x_max / 5 + 1).filter(|p| p % 4 == 1).collect();
    let mut n_mod4 = vec![0u64; xs.len()];
    let np = mod4.partition_point(|&p| p * p < x_max);
    let per_p: Vec<Vec<u64>> = mod4[..np]
        .par_iter()
        .map(|&p| {
            let lo = mod4.partition_point(|&q| q <= p);
            xs.iter()
                .map(|&x| (mod4.partition_point(|&q| q <= x / p).saturating_sub(lo)) as u64)
                .collect()
        })
        .collect();
    for v in per_p {
        for (acc, c) in n_mod4.iter_mut().zip(v) {
            *acc += c;
        }
    }

    let mod8: Vec<u64> = mod4.iter().copied().filter(|p| p % 8 == 1 && *p <= x_max / 17).collect();
    let data: Vec<PrimeData> = mod8
        .par_iter()
        .map(|&p| PrimeData::new(p, ring))
        .collect::<Result<_, _>>()?;
    let facts: Vec<PairFacts> = (0..data.len())
        .into_par_iter()
        .filter(|&i| data[i].p * data[i].p < x_max)
        .map(|i| {
            let pd = &data[i];
            data[i + 1..]
                .iter()
                .take_while(|qd| pd.p * qd.p <= x_max)
                .map(|qd| {
                    let jac = jacobi_u64(pd.p, qd.p);
                    PairFacts {
                        pq: pd.p * qd.p,
                        p16: pd.p % 16,
                        q16: qd.p % 16,
                        chi2: (pd.chi2.value(), qd.chi2.value()),
                        jac: jac.value(),
                        eps: fast_epsilon(pd, qd).value(),
                        pred: if jac == SymbolValue::ONE {
                            fast_prediction(pd, qd, ring)
                        } else {
                            Prediction::Inapplicable
                        },
                    }
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();

    let mut rk4 = vec![0u64; xs.len()];
    let mut yes = vec![0u64; xs.len()];
    let mut cells: BTreeMap<((u64, u64), (i64, i64)), (u64, u64, [i64; 4])> = IndicatorConfig::admissible_cells(ring)
        .into_iter()
        .map(|c| (c, (0, 0, [0; 4])))
        .collect();
    for f in &facts {
        let b = bucket(f.pq);
        if f.jac == 1 {
            rk4[b] += 1;
            if f.pred == Prediction::Yes {
                yes[b] += 1;
            }
        }
        if let Some(c) = cells.get_mut(&((f.p16, f.q16), f.chi2)) {
            c.0 += 1;
            if f.jac == 1 && f.eps == 1 {
                c.1 += 1;
            }
            for (i, (e1, e2)) in IndicatorConfig::all_e().iter().enumerate() {
                c.2[i] += f.jac.pow(*e1 as u32) * f.eps.pow(*e2 as u32);
            }
        }
    }

    let oracle_x = xs.iter().copied().filter(|&x| x <= cfg.oracle_cutoff).max();
    let oracle: Vec<(u64, bool, bool, bool)> = match oracle_x {
        Some(ox) => {
            let pairs = enumerate_pairs(ox, mod4_filter);
            pairs
                .par_iter()
                .map(|&(p, q)| -> Result<_, CriteriaError> {
                    let prof = rank_profile(ring.d() * (p * q) as i64)
                        .map_err(|e| CriteriaError::BadInput(e.to_string()))?;
                    let pred = if rk4_is_two(p, q)? {
                        crate::criteria::predicts_rk8(p, q, ring)? == Prediction::Yes
                    } else {
                        false
                    };
                    Ok((p * q, prof.rk4 == 2, prof.rk4 == 2 && prof.rk8 >= 1, pred && prof.rk8 == 0))
                })
                .collect::<Result<_, _>>()?
        }
        None => Vec::new(),
    };
    let mut o_rk4 = vec![0u64; xs.len()];
    let mut o_rk8 = vec![0u64; xs.len()];
    let mut o_bad = vec![0u64; xs.len()];
    for &(pq, r4, r8, bad) in &oracle {
        let b = bucket(pq);
        o_rk4[b] += r4 as u64;
        o_rk8[b] += r8 as u64;
        o_bad[b] += bad as u64;
    }

    let mut rows = Vec::with_capacity(xs.len());
    let (mut c4, mut cy, mut co4, mut co8, mut cob) = (0, 0, 0, 0, 0);
    for (i, &x) in xs.iter().enumerate() {
        c4 += rk4[i];
        cy += yes[i];
        co4 += o_rk4[i];
        co8 += o_rk8[i];
        cob += o_bad[i];
        let with_oracle = x <= cfg.oracle_cutoff;
        rows.push(CensusRow {
            x,
            n_pairs_mod4: n_mod4[i],
            n_rk4_2: c4,
            n_pred_yes: cy,
            n_oracle_rk8: with_oracle.then_some(co8),
            n_oracle_rk4_2: with_oracle.then_some(co4),
            n_oracle_violations: with_oracle.then_some(cob),
            ratio_pred: (c4 > 0).then(|| cy as f64 / c4 as f64),
            ratio_vs_scale: if x >= 16 { c4 as f64 / density_scale(x) } else { 0.0 },
        });
    }
    let cells = cells
        .into_iter()
        .map(|((r, s), (n_cell, n_constrained, sum_f))| CellCount {
            r,
            s,
            n_cell,
            n_constrained,
            sum_f,
            decomposition_holds: 4 * n_constrained as i64 == sum_f.iter().sum::<i64>(),
        })
        .collect();
    Ok(CensusReport {
        config: cfg.clone(),
        rows,
        cells,
        cl_weights: cl_weights(ring),
        main_theorem_bound: Rational::new(1, ring.d().abs()),
        tolerances: Tolerances::for_ring(ring),
    })
}

/// Checks `#{c = 1, (p/q) = 1, ε = 1} = (1/4)·Σ_𝐞 Σ f(p, q; 𝐫, 𝐬, 𝐞)` over
/// `p < q`, `pq ≤ X`, evaluating both sides pair by pair.
pub fn decomposition_check(
    x: u64,
    r: (u64, u64),
    s: (i64, i64),
    ring: RingTag,
) -> Result<bool, CriteriaError> {
    let probe = IndicatorConfig { r, s, e: (0, 0) };
    if !probe.is_admissible(ring) {
        return Err(CriteriaError::BadInput(format!(
            "cell r = {r:?}, s = {s:?} is not admissible for d = {}",
            ring.d()
        )));
    }
    let pairs = enumerate_pairs(x, |p, q| p % 16 == r.0 && q % 16 == r.1);
    let sides: Vec<(i64, i64)> = pairs
        .par_iter()
        .map(|&(p, q)| -> Result<(i64, i64), CriteriaError> {
            let lhs = c_indicator(p, q, r, s, ring)?
                && jacobi_u64(p, q) == SymbolValue::ONE
                && pair_epsilon(p, q, ring)? == SymbolValue::ONE;
            let mut rhs = 0;
            for e in IndicatorConfig::all_e() {
                rhs += f_indicator(p, q, &IndicatorConfig { r, s, e }, ring)?.value();
            }
            Ok((lhs as i64, rhs))
        })
        .collect::<Result<_, _>>()?;
    let (lhs, rhs) = sides.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(4 * lhs == rhs)
}

/// `#Aut(Z/2^m × Z/2^n)` for `1 ≤ m ≤ n`.
pub fn aut_count(m: u32, n: u32) -> u64 {
    assert!(1 <= m && m <= n, "need 1 <= m <= n, got ({m}, {n})");
    if m == n {
        3 << (4 * m - 3)
    } else {
        1 << (3 * m + n - 2)
    }
}

/// `#Aut(Z/2^m × Z/2^n)` by enumerating images of the two generators.
pub fn aut_count_brute(m: u32, n: u32) -> u64 {
    let (a, b) = (1u64 << m, 1u64 << n);
    let add = |x: (u64, u64), y: (u64, u64)| ((x.0 + y.0) % a, (x.1 + y.1) % b);
    let mul = |k: u64, x: (u64, u64)| ((k * x.0) % a, (k * x.1) % b);
    let elems: Vec<(u64, u64)> = (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).collect();
    let mut count = 0;
    for &g1 in &elems {
        if mul(a, g1) != (0, 0) {
            continue;
        }
        for &g2 in &elems {
            if mul(b, g2) != (0, 0) {
                continue;
            }
            let mut seen = vec![false; (a * b) as usize];
            let mut injective = true;
            for &(x, y) in &elems {
                let img = add(mul(x, g1), mul(y, g2));
                let idx = (img.0 * b + img.1) as usize;
                if seen[idx] {
                    injective = false;
                    break;
                }
                seen[idx] = true;
            }
            count += injective as u64;
        }
    }
    count
}

/// Cohen–Lenstra weights of `CL(D)²` with 2-part `Z/2^m × Z/2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClWeights {
    pub d: RingTag,
    #[serde(serialize_with = "ser_ratio")]
    pub total_weight: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub rk8_weight: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational,
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(1 << e)
    } else {
        Rational::new(1, 1 << -e)
    }
}

/// `Σ_{m≥1} c·ρ^m` for `|ρ| < 1`.
fn geometric(c: Rational, rho: Rational) -> Rational {
    c * rho / (Rational::from_integer(1) - rho)
}

/// The weight of `(m, n)` is `1/#Aut` (d = −4) or `1/(#G·#Aut)` (d = 8).
/// With `#Aut = 3·2^{4m−3}` on the diagonal and `2^{3m+n−2}` off it, and
/// `#G = 2^{m+n}`, both families are geometric in `m` and `n`.
pub fn cl_weights(ring: RingTag) -> ClWeights {
    let g = match ring {
        RingTag::Gaussian => 0,
        RingTag::Sqrt2 => 1,
    };
    // diagonal: (8/3)·2^{−(4+2g)m}
    let diag_c = Rational::new(8, 3);
    let diag_rho = pow2(-(4 + 2 * g));
    // off-diagonal: 4·2^{−(3+g)m}·2^{−(1+g)n}, summed over n > m
    let tau = pow2(-(1 + g));
    let off_c = Rational::from_integer(4) * tau / (Rational::from_integer(1) - tau);
    let off_rho = pow2(-(3 + g)) * tau;
    let total = geometric(diag_c, diag_rho) + geometric(off_c, off_rho);
    let base = diag_c * diag_rho;
    let rk8 = total - base;
    ClWeights {
        d: ring,
        total_weight: total,
        rk8_weight: rk8,
        ratio: rk8 / total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: RingTag = RingTag::Gaussian;
    const S: RingTag = RingTag::Sqrt2;

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_pairs(100, mod4_filter), vec![(5, 13), (5, 17)]);
        assert_eq!(enumerate_pairs(2500, rk4_filter), vec![(17, 89), (17, 137)]);
        assert!(enumerate_pairs(6, |_, _| true).is_empty());
        assert_eq!(enumerate_pairs(15, |_, _| true), vec![(3, 5)]);
    }

    #[test]
    fn aut_counts() {
        assert_eq!(aut_count(1, 1), 6);
        assert_eq!(aut_count(1, 2), 8);
        for n in 1..=3 {
            for m in 1..=n {
                assert_eq!(aut_count(m, n), aut_count_brute(m, n), "({m}, {n})");
            }
        }
    }

    #[test]
    fn weights_match_paper() {
        let w = cl_weights(G);
        assert_eq!((w.total_weight, w.ratio), (Rational::new(4, 9), Rational::new(5, 8)));
        assert_eq!(w.total_weight - w.rk8_weight, Rational::new(1, 6));
        let w = cl_weights(S);
        assert_eq!((w.total_weight, w.ratio), (Rational::new(4, 63), Rational::new(11, 32)));
        assert_eq!(w.total_weight - w.rk8_weight, Rational::new(1, 24));
    }

    #[test]
    fn weights_match_partial_sums() {
        for (ring, real) in [(G, false), (S, true)] {
            let mut s = 0.0f64;
            for m in 1..30u32 {
                for n in m..60u32 {
                    let size = if real { (m + n) as i32 } else { 0 };
                    let aut = if m == n {
                        3.0 * 2f64.powi(4 * m as i32 - 3)
                    } else {
                        2f64.powi((3 * m + n) as i32 - 2)
                    };
                    s += 1.0 / (2f64.powi(size) * aut);
                }
            }
            let t = cl_weights(ring).total_weight;
            assert!((s - *t.numer() as f64 / *t.denom() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn invariant_failures_flags_tampering() {
        let cfg = CensusConfig { ring: RingTag::Gaussian, x_max: 5000, checkpoints: 2, oracle_cutoff: 5000 };
        let mut rep = run_census(&cfg).unwrap();
        assert!(rep.invariant_failures().is_empty());
        rep.rows[1].n_pred_yes = rep.rows[1].n_rk4_2 + 1;
        rep.rows[0].n_oracle_violations = Some(1);
        rep.cells[0].decomposition_holds = false;
        assert_eq!(rep.invariant_failures().len(), 3);
    }

    #[test]
    fn decomposition_small() {
        for ring in [G, S] {
            for (r, s) in IndicatorConfig::admissible_cells(ring) {
                assert_eq!(decomposition_check(2500, r, s, ring), Ok(true));
            }
        }
        assert!(decomposition_check(2500, (1, 1), (1, -1), G).is_err());
        assert!(decomposition_check(2500, (1, 9), (1, 1), S).is_err());
    }

    #[test]
    fn census_counters() {
        for ring in [G, S] {
            let cfg = CensusConfig {
                ring,
                x_max: 40_000,
                checkpoints: 4,
                oracle_cutoff: 20_000,
            };
            let rep = run_census(&cfg).unwrap();
            assert_eq!(rep.rows.len(), 4);
            let brute_mod4 = enumerate_pairs(40_000, mod4_filter).len() as u64;
            let brute_rk4 = enumerate_pairs(40_000, rk4_filter).len() as u64;
            let last = rep.rows.last().unwrap();
            assert_eq!((last.n_pairs_mod4, last.n_rk4_2), (brute_mod4, brute_rk4));
            let yes = enumerate_pairs(40_000, rk4_filter)
                .into_iter()
                .filter(|&(p, q)| crate::criteria::predicts_rk8(p, q, ring) == Ok(Prediction::Yes))
                .count() as u64;
            assert_eq!(last.n_pred_yes, yes);
            for w in rep.rows.windows(2) {
                assert!(w[0].n_pairs_mod4 <= w[1].n_pairs_mod4);
                assert!(w[0].n_rk4_2 <= w[1].n_rk4_2 && w[0].n_pred_yes <= w[1].n_pred_yes);
            }
            for row in &rep.rows {
                assert!(row.n_pred_yes <= row.n_rk4_2 && row.n_rk4_2 <= row.n_pairs_mod4);
                if row.x <= 20_000 {
                    assert_eq!(row.n_oracle_rk4_2, Some(row.n_rk4_2));
                    assert_eq!(row.n_oracle_violations, Some(0));
                    assert!(row.n_oracle_rk8.unwrap() >= row.n_pred_yes);
                } else {
                    assert_eq!(row.n_oracle_rk8, None);
                }
            }
            let constrained: u64 = rep.cells.iter().map(|c| c.n_constrained).sum();
            assert_eq!(constrained, last.n_pred_yes);
            assert!(rep.cells.iter().all(|c| c.decomposition_holds));
            assert!(rep.invariant_failures().is_empty());
        }
    }
}
