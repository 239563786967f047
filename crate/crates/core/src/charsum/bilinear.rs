use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd_u64;
use crate::quadring::{normalize_generator, split_prime, Convention, ResidueRing};
use crate::sieve::SegmentedSieve;
use crate::symbols::{jacobi_u64, Gamma};
use crate::{Elem, Rational, RingTag};

/// Coefficient sequences supported on prime elements of norm `≡ 1 (mod 8)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficients {
    PrimeOnes,
    PrimeRandomSigns { seed: u64 },
}

impl Coefficients {
    fn value(&self, w: &Elem) -> i64 {
        match *self {
            Coefficients::PrimeOnes => 1,
            Coefficients::PrimeRandomSigns { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((w.a as u32 as u64) << 32) | w.b as u32 as u64);
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanMode {
    #[serde(rename = "B0")]
    PrimitiveZB0,
    #[serde(rename = "Q")]
    UnrestrictedZQ,
}

/// An element of a window with its coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weighted {
    pub w: Elem,
    pub coeff: i64,
}

fn upper(m: u64, delta: Rational) -> u64 {
    let (num, den) = (*delta.numer() as u128, *delta.denom() as u128);
    (m as u128 * (den + num) / den) as u64
}

fn window_reps(w: &Elem) -> Vec<Elem> {
    match w.ring {
        RingTag::Gaussian => {
            vec![normalize_generator(w, Convention::PrimaryZi).expect("odd").value]
        }
        RingTag::Sqrt2 => {
            let c = w.canonical();
            vec![c, -c]
        }
    }
}

/// The prime elements of `R_d(M)` with norm `≡ 1 (mod 8)`: primary in Z[i],
/// `w` or `−w` in the fundamental sector in Z[√2], and
/// `M < N(w) ≤ M(1+Δ)`.
pub fn window(ring: RingTag, m: u64, delta: Rational, coeffs: Coefficients) -> Vec<Weighted> {
    let hi = upper(m, delta);
    let mut els = Vec::new();
    for p in SegmentedSieve::new(m + 1, hi + 1).filter(|p| p % 8 == 1) {
        let w = split_prime(p, ring).expect("split prime").value;
        els.extend(window_reps(&w));
        els.extend(window_reps(&w.conj()));
    }
    let (lo_r, hi_r) = (crate::arith::isqrt(m) + 1, crate::arith::isqrt(hi));
    for p in SegmentedSieve::new(lo_r, hi_r + 1).filter(|&p| p > 2 && !ring.splits(p)) {
        if p * p > m {
            els.extend(window_reps(&Elem::from_int(p as i64, ring)));
        }
    }
    els.sort_by_key(|w| (w.norm(), w.a, w.b));
    els.into_iter()
        .map(|w| Weighted {
            w,
            coeff: coeffs.value(&w),
        })
        .filter(|x| x.coeff != 0)
        .collect()
}

/// `Σ_{w primitive} Σ_z α_w β_z γ(w, z)`, with `z` restricted to primitive
/// elements in mode `B0`.
pub fn bilinear_sum(ws: &[Weighted], zs: &[Weighted], mode: ScanMode) -> i64 {
    let zs: Vec<&Weighted> = zs
        .iter()
        .filter(|z| mode == ScanMode::UnrestrictedZQ || z.w.is_primitive())
        .collect();
    ws.par_iter()
        .filter(|w| w.w.is_primitive())
        .map(|w| {
            let g = Gamma::new(&w.w).expect("odd element");
            w.coeff * zs.iter().map(|z| z.coeff * g.eval(&z.w).value()).sum::<i64>()
        })
        .sum()
}

/// `Q − B₀` recomputed from rational Jacobi symbols: for primitive `w` of
/// norm `n` and `z = g·z'` with `z'` primitive,
/// `γ(w, z) = μ(w)·(g/n)·(ι(z̄')/n)` where `ι: Z[√d₀]/(w) ≅ Z/n`.
pub fn nonprimitive_contribution(ws: &[Weighted], zs: &[Weighted]) -> i64 {
    let nonprim: Vec<&Weighted> = zs.iter().filter(|z| !z.w.is_primitive()).collect();
    ws.par_iter()
        .filter(|w| w.w.is_primitive())
        .map(|w| {
            let res = ResidueRing::new(&w.w).expect("nonzero");
            let n = res.len() as u64;
            let iota = |x: &Elem| res.to_rational(x).expect("primitive modulus");
            let mu = jacobi_u64(iota(&w.w.conj()), n).value();
            let inner: i64 = nonprim
                .iter()
                .map(|z| {
                    let g = gcd_u64(z.w.a.unsigned_abs(), z.w.b.unsigned_abs()) as i64;
                    let zp = Elem::new(z.w.a / g, z.w.b / g, z.w.ring);
                    let s = jacobi_u64(g as u64 % n, n).value() * jacobi_u64(iota(&zp.conj()), n).value();
                    z.coeff * s
                })
                .sum();
            w.coeff * mu * inner
        })
        .sum()
}

/// One row of the decay table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearScanResult {
    pub d: i64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub mode: ScanMode,
    pub value: i64,
    /// `|value| / (Δ²MN)`.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub ring: RingTag,
    /// `M = N = 2^k` for each `k`.
    pub exponents: Vec<u32>,
    pub delta: Rational,
    pub coefficients: Coefficients,
    pub modes: Vec<ScanMode>,
}

impl ScanConfig {
    pub fn decay(ring: RingTag) -> Self {
        Self {
            ring,
            exponents: vec![10, 12, 14, 16],
            delta: Rational::new(1, 8),
            coefficients: Coefficients::PrimeOnes,
            modes: vec![ScanMode::PrimitiveZB0, ScanMode::UnrestrictedZQ],
        }
    }
}

/// Exact `B₀` and `Q` over the windows `R_d(2^k)`, one row per exponent and
/// mode; rows with `ΔM < 1` are dropped.
pub fn bilinear_scan(cfg: &ScanConfig) -> Vec<BilinearScanResult> {
    let delta_f = *cfg.delta.numer() as f64 / *cfg.delta.denom() as f64;
    let mut out = Vec::new();
    for &k in &cfg.exponents {
        let m = 1u64 << k;
        if cfg.delta * Rational::from_integer(m as i64) < Rational::from_integer(1) {
            continue;
        }
        let ws = window(cfg.ring, m, cfg.delta, cfg.coefficients);
        for &mode in &cfg.modes {
            let value = bilinear_sum(&ws, &ws, mode);
            let scale = delta_f * delta_f * m as f64 * m as f64;
            out.push(BilinearScanResult {
                d: cfg.ring.d(),
                m,
                n: m,
                delta: delta_f,
                mode,
                value,
                normalized: value.unsigned_abs() as f64 / scale,
            });
        }
    }
    out
}

/// Least-squares slope of `log(normalized)` against `log(M)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Two-sided 95% normal band on the slope.
    pub band: (f64, f64),
}

/// Fits rows with nonzero `normalized`; `None` below three points.
pub fn fit_decay_exponent(rows: &[BilinearScanResult]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.normalized > 0.0)
        .map(|r| ((r.m as f64).ln(), r.normalized.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Some(DecayFit {
        points: n,
        slope,
        intercept,
        stderr,
        band: (slope - 1.96 * stderr, slope + 1.96 * stderr),
    })
}
