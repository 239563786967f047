//! Invariant suites with structured, never-panicking reports.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::census::{
    aut_count, aut_count_brute, cl_weights, decomposition_check, enumerate_pairs, mod4_filter,
    rk4_filter,
};
use crate::charsum::{
    bilinear_scan, bilinear_sum, BilinearScanResult, delta_table, fit_decay_exponent, key_cancellation_sum,
    key_cancellation_sum_full, nonprimitive_contribution, periodicity_smoke, predicted_abs,
    primitive_ideals, sign_class, window, Coefficients, ScanConfig, ScanMode, Weighted,
};
use crate::classgroup::rank_profile;
use crate::criteria::{
    admissible_generators, build_pair, pair_from_generators, rk4_is_two, IndicatorConfig,
    Prediction,
};
use crate::quadring::split_prime;
use crate::sieve::primes_up_to;
use crate::symbols::{chi_t, chi_t_congruence, mu, psi_w, Gamma, SymbolValue};
use crate::{Elem, Rational, RingTag};

/// Suite names, in run order.
pub const SUITES: [&str; 11] = [
    "keycancellation",
    "reciprocitylem",
    "SteResult",
    "prop4rank",
    "algebra",
    "decomposition",
    "heuristics",
    "choiceindependence",
    "generalBsum",
    "deltafactor",
    "sumQi",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub rings: Vec<RingTag>,
    /// Empty means every suite.
    pub suites: Vec<String>,
    /// Overrides the norm bound of `keycancellation` (150) and
    /// `reciprocitylem` (500).
    pub max_norm: Option<u64>,
    /// Bound on `pq` for the exhaustive oracle comparisons.
    pub pqmax: u64,
    /// Also compare against the oracle on random pairs with `pq ≤ 10⁶`.
    pub sample_oracle: bool,
    pub seed: u64,
    pub samples: usize,
    /// Bound on split primes for `SteResult`.
    pub split_bound: u64,
    /// `X` for the decomposition identity.
    pub decomposition_x: u64,
    /// Bound on `pq` for `choiceindependence`.
    pub choice_pqmax: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            rings: RingTag::ALL.to_vec(),
            suites: Vec::new(),
            max_norm: None,
            pqmax: 20_000,
            sample_oracle: false,
            seed: 1,
            samples: 1000,
            split_bound: 100_000,
            decomposition_x: 100_000,
            choice_pqmax: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checked: u64,
    pub failures: u64,
    pub details: BTreeMap<String, Value>,
    pub failure_examples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

const MAX_EXAMPLES: usize = 10;

#[derive(Default)]
struct Tally {
    checked: u64,
    failures: u64,
    examples: Vec<String>,
    details: BTreeMap<String, Value>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(msg);
        }
    }

    /// Folds per-item outcomes computed in parallel, in input order.
    fn absorb(&mut self, outcomes: Vec<Option<String>>) {
        for o in outcomes {
            self.checked += 1;
            if let Some(m) = o {
                self.fail(m);
            }
        }
    }

    fn detail(&mut self, ring: Option<RingTag>, key: &str, v: Value) {
        let k = match ring {
            Some(r) => format!("d={}:{key}", r.d()),
            None => key.to_string(),
        };
        self.details.insert(k, v);
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            passed: self.failures == 0 && self.checked > 0,
            checked: self.checked,
            failures: self.failures,
            details: self.details,
            failure_examples: self.examples,
        }
    }
}

/// Runs the selected suites; panics inside a suite become failures.
pub fn verify_all(cfg: &VerifyConfig) -> VerifyReport {
    let mut suites = Vec::new();
    for name in SUITES {
        if !cfg.suites.is_empty() && !cfg.suites.iter().any(|s| s == name) {
            continue;
        }
        suites.push(run_suite(name, cfg));
    }
    VerifyReport {
        passed: !suites.is_empty() && suites.iter().all(|s| s.passed),
        suites,
    }
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> SuiteReport {
    let res = catch_unwind(AssertUnwindSafe(|| {
        let mut t = Tally::default();
        match name {
            "keycancellation" => keycancellation(cfg, &mut t),
            "reciprocitylem" => reciprocity(cfg, &mut t),
            "SteResult" => ste_result(cfg, &mut t),
            "prop4rank" => prop4rank(cfg, &mut t),
            "algebra" => algebra(cfg, &mut t),
            "decomposition" => decomposition(cfg, &mut t),
            "heuristics" => heuristics(&mut t),
            "choiceindependence" => choice(cfg, &mut t),
            "generalBsum" => general_bsum(cfg, &mut t),
            "deltafactor" => deltafactor(cfg, &mut t),
            "sumQi" => sum_qi(cfg, &mut t),
            _ => t.fail(format!("unknown suite {name}")),
        }
        t
    }));
    match res {
        Ok(t) => t.finish(name),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            let mut t = Tally::default();
            t.fail(format!("{name}: aborted: {msg}"));
            t.finish(name)
        }
    }
}

/// Grid size up to which the reduced key sum is compared with direct
/// enumeration modulo `W`.
const CROSS_CHECK_GRID: u128 = 1 << 18;

fn keycancellation(cfg: &VerifyConfig, t: &mut Tally) {
    let bound = cfg.max_norm.unwrap_or(150);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &ring in &cfg.rings {
        let ideals = primitive_ideals(ring, bound);
        let pairs: Vec<(Elem, Elem)> =
            ideals.iter().flat_map(|a| ideals.iter().map(move |b| (*a, *b))).collect();
        let outcomes: Vec<(Option<String>, bool, bool)> = pairs
            .par_iter()
            .map(|(w1, w2)| {
                let run = || -> Result<(Option<String>, bool, bool), String> {
                    let r = key_cancellation_sum(w1, w2).map_err(|e| e.to_string())?;
                    let c = key_cancellation_sum(&w1.conj(), &w2.conj()).map_err(|e| e.to_string())?;
                    let mut msg = None;
                    if !r.holds() {
                        msg = Some(format!(
                            "keycancellation d={}: ({w1}, {w2}) W={} r={} measured {} expected ±{}",
                            ring.d(),
                            r.big_w,
                            r.r,
                            r.measured,
                            r.predicted_abs
                        ));
                    } else if c.measured.abs() != r.measured.abs() {
                        msg = Some(format!(
                            "keycancellation d={}: conjugate pair of ({w1}, {w2}) gives {} vs {}",
                            ring.d(),
                            c.measured,
                            r.measured
                        ));
                    }
                    let grid = r.big_w as u128 * r.big_w as u128;
                    let crossed = grid <= CROSS_CHECK_GRID;
                    if crossed && msg.is_none() {
                        let f = key_cancellation_sum_full(w1, w2).map_err(|e| e.to_string())?;
                        if f.measured != r.measured {
                            msg = Some(format!(
                                "keycancellation d={}: ({w1}, {w2}) full grid {} vs reduced {}",
                                ring.d(),
                                f.measured,
                                r.measured
                            ));
                        }
                    }
                    Ok((msg, r.predicted_abs > 0, crossed))
                };
                run().unwrap_or_else(|e| (Some(format!("keycancellation d={}: {e}", ring.d())), false, false))
            })
            .collect();
        let nonzero = outcomes.iter().filter(|o| o.1).count();
        let crossed = outcomes.iter().filter(|o| o.2).count();
        t.absorb(outcomes.into_iter().map(|o| o.0).collect());
        t.detail(Some(ring), "ideals", json!(ideals.len()));
        t.detail(Some(ring), "exhaustive_pairs", json!(pairs.len()));
        t.detail(Some(ring), "nonzero_pairs", json!(nonzero));
        t.detail(Some(ring), "full_grid_cross_checks", json!(crossed));

        let pool = primitive_ideals(ring, 1000);
        let sample: Vec<(Elem, Elem, u64)> = (0..cfg.samples)
            .map(|_| {
                let a = pool[rng.gen_range(0..pool.len())];
                let b = pool[rng.gen_range(0..pool.len())];
                (a, b, rng.gen())
            })
            .collect();
        let outcomes: Vec<Option<String>> = sample
            .par_iter()
            .map(|(w1, w2, s)| {
                let r = match key_cancellation_sum(w1, w2) {
                    Ok(r) => r,
                    Err(e) => return Some(format!("keycancellation d={}: {e}", ring.d())),
                };
                let mut local = ChaCha8Rng::seed_from_u64(*s);
                let smoke = periodicity_smoke(w1, w2, 20, &mut local).unwrap_or(usize::MAX);
                (!r.holds() || smoke != 0).then(|| {
                    format!(
                        "keycancellation d={}: random ({w1}, {w2}) measured {} expected ±{}, periodicity misses {smoke}",
                        ring.d(),
                        r.measured,
                        r.predicted_abs
                    )
                })
            })
            .collect();
        t.absorb(outcomes);
        t.detail(Some(ring), "random_pairs_norm_le_1000", json!(sample.len()));
    }
}

/// Odd elements with `|N| ≤ bound`; in Z[√2] restricted to the box
/// `|a|, |b| ≤ 2⌊√(2·bound)⌋ + 1`.
pub fn odd_elements(ring: RingTag, bound: u64) -> Vec<Elem> {
    let b = bound as i64;
    let r = match ring {
        RingTag::Gaussian => crate::arith::isqrt(bound) as i64,
        RingTag::Sqrt2 => 2 * crate::arith::isqrt(2 * bound) as i64 + 1,
    };
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            let w = Elem::new(x, y, ring);
            if w.is_odd() && w.norm().abs() <= b {
                out.push(w);
            }
        }
    }
    out
}

fn reciprocity(cfg: &VerifyConfig, t: &mut Tally) {
    let bound = cfg.max_norm.unwrap_or(500);
    for &ring in &cfg.rings {
        let els = odd_elements(ring, bound);
        let gammas: Vec<Gamma> = els.iter().map(|w| Gamma::new(w).expect("odd")).collect();
        let outcomes: Vec<Vec<Option<String>>> = (0..els.len())
            .into_par_iter()
            .map(|i| {
                (0..els.len())
                    .map(|j| {
                        let (w, z) = (&els[i], &els[j]);
                        let lhs = gammas[i].eval(z) * gammas[j].eval(w);
                        let rhs = mu(&(w * z)).expect("odd product");
                        (lhs != rhs).then(|| {
                            format!("reciprocitylem d={}: γ({w},{z})γ({z},{w}) = {lhs}, μ = {rhs}", ring.d())
                        })
                    })
                    .collect()
            })
            .collect();
        t.absorb(outcomes.into_iter().flatten().collect());
        t.detail(Some(ring), "elements", json!(els.len()));
        t.detail(Some(ring), "pairs", json!(els.len() * els.len()));
    }
}

fn ste_result(cfg: &VerifyConfig, t: &mut Tally) {
    for &ring in &cfg.rings {
        let (mut compared, mut no_class) = (0u64, 0u64);
        for p in primes_up_to(cfg.split_bound).into_iter().filter(|&p| p > 2 && ring.splits(p)) {
            let w = match split_prime(p, ring) {
                Ok(g) => g.value,
                Err(e) => {
                    t.fail(format!("SteResult d={}: p={p}: {e}", ring.d()));
                    continue;
                }
            };
            for g in [w, w.conj()] {
                let sym = chi_t(&g);
                let cong = chi_t_congruence(&g);
                match (sym, cong) {
                    (Ok(s), Ok(Some(c))) => {
                        compared += 1;
                        t.check(s == c, || {
                            format!("SteResult d={}: p={p}, {g}: symbol {s}, congruence {c}", ring.d())
                        });
                    }
                    (Ok(_), Ok(None)) => {
                        no_class += 1;
                        let expected = ring == RingTag::Gaussian && p % 8 == 5;
                        t.check(expected, || {
                            format!("SteResult d={}: p={p}: no square-class generator of ({g})", ring.d())
                        });
                    }
                    (a, b) => t.fail(format!("SteResult d={}: p={p}: {a:?} {b:?}", ring.d())),
                }
            }
        }
        t.detail(Some(ring), "generators_compared", json!(compared));
        t.detail(Some(ring), "generators_without_square_class", json!(no_class));
    }
}

fn oracle_pairs(pqmax: u64) -> Vec<(u64, u64)> {
    enumerate_pairs(pqmax, mod4_filter)
}

fn prop4rank(cfg: &VerifyConfig, t: &mut Tally) {
    let pairs = oracle_pairs(cfg.pqmax);
    for &ring in &cfg.rings {
        let outcomes: Vec<(Option<String>, bool)> = pairs
            .par_iter()
            .map(|&(p, q)| {
                let d = ring.d() * (p * q) as i64;
                match (rank_profile(d), rk4_is_two(p, q)) {
                    (Ok(prof), Ok(crit)) => {
                        let ok = prof.rk2 == 2 && (prof.rk4 == 2) == crit;
                        (
                            (!ok).then(|| {
                                format!(
                                    "prop4rank d={}: ({p}, {q}) oracle rk2={} rk4={}, criterion {crit}",
                                    ring.d(),
                                    prof.rk2,
                                    prof.rk4
                                )
                            }),
                            crit,
                        )
                    }
                    (a, b) => (Some(format!("prop4rank d={}: ({p}, {q}): {a:?} {b:?}", ring.d())), false),
                }
            })
            .collect();
        let rk4 = outcomes.iter().filter(|o| o.1).count();
        t.absorb(outcomes.into_iter().map(|o| o.0).collect());
        t.detail(Some(ring), "pairs", json!(pairs.len()));
        t.detail(Some(ring), "rk4_2_pairs", json!(rk4));
    }
    t.detail(None, "pqmax", json!(cfg.pqmax));
}

/// `(prediction, oracle rk₈)` for a pair with `rk₄ = 2`.
fn soundness(p: u64, q: u64, ring: RingTag) -> Result<(Prediction, u32), String> {
    let pred = build_pair(p, q, ring).map_err(|e| e.to_string())?.prediction();
    let prof = rank_profile(ring.d() * (p * q) as i64).map_err(|e| e.to_string())?;
    Ok((pred, prof.rk8))
}

fn algebra(cfg: &VerifyConfig, t: &mut Tally) {
    let exhaustive = enumerate_pairs(cfg.pqmax, rk4_filter);
    let sampled = if cfg.sample_oracle {
        let mut all = enumerate_pairs(1_000_000, rk4_filter);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        all.shuffle(&mut rng);
        all.truncate(cfg.samples);
        all.sort_unstable();
        all
    } else {
        Vec::new()
    };
    for &ring in &cfg.rings {
        for (label, pairs) in [("exhaustive", &exhaustive), ("sampled", &sampled)] {
            let outcomes: Vec<Result<(Prediction, u32), String>> =
                pairs.par_iter().map(|&(p, q)| soundness(p, q, ring)).collect();
            let (mut yes, mut no_rk8, mut inapplicable_rk8) = (0, 0, 0);
            for (&(p, q), o) in pairs.iter().zip(outcomes) {
                match o {
                    Ok((pred, rk8)) => {
                        yes += (pred == Prediction::Yes) as u64;
                        no_rk8 += (pred == Prediction::No && rk8 >= 1) as u64;
                        inapplicable_rk8 += (pred == Prediction::Inapplicable && rk8 >= 1) as u64;
                        t.check(pred != Prediction::Yes || rk8 >= 1, || {
                            format!("algebra d={}: ({p}, {q}) predicted Yes but oracle rk8 = 0", ring.d())
                        });
                    }
                    Err(e) => t.fail(format!("algebra d={}: ({p}, {q}): {e}", ring.d())),
                }
            }
            t.detail(Some(ring), &format!("{label}_pairs"), json!(pairs.len()));
            t.detail(Some(ring), &format!("{label}_predicted_yes"), json!(yes));
            t.detail(Some(ring), &format!("{label}_no_but_rk8"), json!(no_rk8));
            t.detail(Some(ring), &format!("{label}_inapplicable_but_rk8"), json!(inapplicable_rk8));
        }
    }
    t.detail(None, "pqmax", json!(cfg.pqmax));
    t.detail(None, "sampled_bound", json!(if cfg.sample_oracle { 1_000_000 } else { 0 }));
}

fn decomposition(cfg: &VerifyConfig, t: &mut Tally) {
    for &ring in &cfg.rings {
        let cells = IndicatorConfig::admissible_cells(ring);
        for &(r, s) in &cells {
            match decomposition_check(cfg.decomposition_x, r, s, ring) {
                Ok(ok) => t.check(ok, || format!("decomposition d={}: cell r={r:?} s={s:?} unequal", ring.d())),
                Err(e) => t.fail(format!("decomposition d={}: {e}", ring.d())),
            }
        }
        t.check(decomposition_check(1000, (1, 1), (1, -1), ring).is_err(), || {
            format!("decomposition d={}: s1s2 = -1 accepted", ring.d())
        });
        t.detail(Some(ring), "cells", json!(cells.len()));
    }
    t.detail(None, "X", json!(cfg.decomposition_x));
}

fn heuristics(t: &mut Tally) {
    for n in 1..=3 {
        for m in 1..=n {
            let (f, b) = (aut_count(m, n), aut_count_brute(m, n));
            t.check(f == b, || format!("heuristics: #Aut(Z/2^{m} x Z/2^{n}) formula {f}, brute {b}"));
        }
    }
    for (ring, total, ratio) in [
        (RingTag::Gaussian, Rational::new(4, 9), Rational::new(5, 8)),
        (RingTag::Sqrt2, Rational::new(4, 63), Rational::new(11, 32)),
    ] {
        let w = cl_weights(ring);
        t.check(w.total_weight == total && w.ratio == ratio, || {
            format!("heuristics d={}: weights {} ratio {}", ring.d(), w.total_weight, w.ratio)
        });
        t.detail(Some(ring), "total_weight", json!(w.total_weight.to_string()));
        t.detail(Some(ring), "ratio", json!(w.ratio.to_string()));
    }
}

fn choice(cfg: &VerifyConfig, t: &mut Tally) {
    let pairs = enumerate_pairs(cfg.choice_pqmax, rk4_filter);
    for &ring in &cfg.rings {
        let outcomes: Vec<Vec<Option<String>>> = pairs
            .par_iter()
            .map(|&(p, q)| choice_pair(p, q, ring))
            .collect();
        let n: usize = outcomes.iter().map(|o| o.len()).sum();
        t.absorb(outcomes.into_iter().flatten().collect());
        t.detail(Some(ring), "pairs", json!(pairs.len()));
        t.detail(Some(ring), "checks", json!(n));
    }
    t.detail(None, "pqmax", json!(cfg.choice_pqmax));
}

fn choice_pair(p: u64, q: u64, ring: RingTag) -> Vec<Option<String>> {
    let tag = format!("choiceindependence d={}: ({p}, {q})", ring.d());
    let mut out = Vec::new();
    let (base, ws, zs) = match (build_pair(p, q, ring), admissible_generators(p, ring), admissible_generators(q, ring)) {
        (Ok(b), Ok(w), Ok(z)) => (b, w, z),
        (a, b, c) => return vec![Some(format!("{tag}: {:?} {:?} {:?}", a.err(), b.err(), c.err()))],
    };
    let psi_ref = |w: &Elem, z: &Elem| -> Option<SymbolValue> {
        let w0 = if w.associated(&base.w) { base.w } else { base.w.conj() };
        let z0 = if z.associated(&base.z) { base.z } else { base.z.conj() };
        psi_w(&w0, &z0).ok()
    };
    for w in &ws {
        for z in &zs {
            match pair_from_generators(p, q, w, z) {
                Ok(r) => {
                    let ok = r.prediction() == base.prediction()
                        && (!r.applicable() || r.epsilon == base.epsilon);
                    out.push((!ok).then(|| {
                        format!("{tag}: generators ({w}, {z}) give {:?}/{}, default {:?}/{}", r.prediction(), r.epsilon, base.prediction(), base.epsilon)
                    }));
                    let psi = psi_w(w, z).ok();
                    out.push((psi != psi_ref(w, z)).then(|| format!("{tag}: ψ_{w}(({z})) = {psi:?} depends on the generators")));
                    if r.applicable() {
                        let m = mu(w).ok();
                        let ok = psi.zip(m).is_some_and(|(s, m)| m * s == r.epsilon);
                        out.push((!ok).then(|| format!("{tag}: ε = {} but μ({w})ψ_w(({z})) = {:?}·{psi:?}", r.epsilon, m)));
                    }
                }
                Err(e) => out.push(Some(format!("{tag}: generators ({w}, {z}): {e}"))),
            }
        }
    }
    out
}

/// The `B₀` rows of a scan, in scan order.
pub fn b0_rows(rows: &[BilinearScanResult]) -> Vec<BilinearScanResult> {
    rows.iter().filter(|r| r.mode == ScanMode::PrimitiveZB0).cloned().collect()
}

/// Whether the normalized values strictly decrease along the rows.
pub fn strictly_decreasing(rows: &[BilinearScanResult]) -> bool {
    rows.windows(2).all(|w| w[1].normalized < w[0].normalized)
}

fn general_bsum(cfg: &VerifyConfig, t: &mut Tally) {
    for &ring in &cfg.rings {
        let scan = ScanConfig::decay(ring);
        let rows = bilinear_scan(&scan);
        t.check(bilinear_scan(&scan) == rows, || format!("generalBsum d={}: scan not reproducible", ring.d()));
        for r in &rows {
            let ws = window(ring, r.m, scan.delta, scan.coefficients);
            let bound = (ws.len() * ws.len()) as i64;
            t.check(r.value.abs() <= bound, || {
                format!("generalBsum d={}: M={} {:?} value {} exceeds trivial bound {bound}", ring.d(), r.m, r.mode, r.value)
            });
        }
        let b0 = b0_rows(&rows);
        t.detail(Some(ring), "rows", serde_json::to_value(&rows).unwrap_or(Value::Null));
        t.detail(Some(ring), "b0_strictly_decreasing", json!(strictly_decreasing(&b0)));
        t.detail(Some(ring), "fit", serde_json::to_value(fit_decay_exponent(&b0)).unwrap_or(Value::Null));
    }
}

fn class_filter(ws: &[Weighted], key: ((u8, u8), i8)) -> Vec<Weighted> {
    ws.iter().copied().filter(|x| sign_class(&x.w) == key).collect()
}

fn deltafactor(cfg: &VerifyConfig, t: &mut Tally) {
    for &ring in &cfg.rings {
        let table = match delta_table(ring) {
            Ok(tb) => tb,
            Err(e) => {
                t.fail(format!("deltafactor d={}: {e}", ring.d()));
                continue;
            }
        };
        t.check(table.min_samples() >= crate::charsum::DELTA_MIN_SAMPLES, || {
            format!("deltafactor d={}: only {} samples in some class", ring.d(), table.min_samples())
        });
        if ring == RingTag::Gaussian {
            t.check(table.entries.values().all(|e| e.delta == SymbolValue::ONE), || {
                "deltafactor d=-4: δ ≠ 1 on some class".into()
            });
        }
        let coeffs = Coefficients::PrimeRandomSigns { seed: cfg.seed };
        let delta = Rational::new(1, 4);
        let ws = window(ring, 1500, delta, coeffs);
        let zs = window(ring, 2500, delta, coeffs);
        let keys = |v: &[Weighted]| {
            let mut k: Vec<_> = v.iter().filter(|x| x.w.is_primitive()).map(|x| sign_class(&x.w)).collect();
            k.sort_unstable();
            k.dedup();
            k
        };
        let mut cells = 0;
        for kw in keys(&ws) {
            for kz in keys(&zs) {
                let (a, b) = (class_filter(&ws, kw), class_filter(&zs, kz));
                let d = table.get(&a[0].w, &b[0].w);
                let lhs = bilinear_sum(&a, &b, ScanMode::PrimitiveZB0);
                let rhs = bilinear_sum(&b, &a, ScanMode::PrimitiveZB0);
                cells += 1;
                t.check(d.is_some_and(|d| lhs == d.value() * rhs), || {
                    format!("deltafactor d={}: classes {kw:?} {kz:?}: {lhs} vs δ={d:?}·{rhs}", ring.d())
                });
            }
        }
        t.detail(Some(ring), "classes", json!(table.entries.len()));
        t.detail(Some(ring), "min_samples_per_class", json!(table.min_samples()));
        t.detail(
            Some(ring),
            "delta_minus_one_classes",
            json!(table.entries.values().filter(|e| e.delta == SymbolValue::MINUS_ONE).count()),
        );
        t.detail(Some(ring), "symmetry_cells", json!(cells));
    }
}

fn sum_qi(cfg: &VerifyConfig, t: &mut Tally) {
    for &ring in &cfg.rings {
        for coeffs in [Coefficients::PrimeOnes, Coefficients::PrimeRandomSigns { seed: cfg.seed }] {
            for m in [1000u64, 2000, 4000, 8000] {
                let ws = window(ring, m, Rational::new(1, 4), coeffs);
                let b0 = bilinear_sum(&ws, &ws, ScanMode::PrimitiveZB0);
                let q = bilinear_sum(&ws, &ws, ScanMode::UnrestrictedZQ);
                let np = nonprimitive_contribution(&ws, &ws);
                t.check(q - b0 == np, || {
                    format!("sumQi d={}: M={m} {coeffs:?}: Q - B0 = {} but non-primitive part {np}", ring.d(), q - b0)
                });
            }
        }
    }
    // sanity anchors for the key identity closed form
    let w = Elem::new(1, 2, RingTag::Gaussian);
    t.check(predicted_abs(&w, &w).map(|x| x.2) == Ok(500), || "sumQi: closed form W=25".into());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_reported_not_panicking() {
        let r = run_suite("nonesuch", &VerifyConfig::default());
        assert!(!r.passed);
        assert_eq!(r.failures, 1);
    }

    #[test]
    fn small_bounds_pass() {
        let cfg = VerifyConfig {
            max_norm: Some(60),
            pqmax: 3000,
            split_bound: 3000,
            decomposition_x: 3000,
            choice_pqmax: 3000,
            samples: 20,
            suites: ["keycancellation", "reciprocitylem", "SteResult", "prop4rank", "algebra", "decomposition", "heuristics", "choiceindependence", "sumQi"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            ..VerifyConfig::default()
        };
        let rep = verify_all(&cfg);
        for s in &rep.suites {
            assert!(s.passed, "{}: {:?}", s.suite, s.failure_examples);
        }
    }
}
