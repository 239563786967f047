//! Acceptance criteria: one PASS/FAIL line each, tolerances pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use eightrank::census::{run_census, CensusConfig, CensusReport, Tolerances, DEFAULT_ORACLE_CUTOFF};
use eightrank::charsum::{bilinear_scan, fit_decay_exponent, ScanConfig};
use eightrank::verify::{b0_rows, run_suite, strictly_decreasing, SuiteReport, VerifyConfig};
use eightrank::RingTag;

const KEY_MAX_NORM: u64 = 150;
const KEY_RANDOM_PAIRS: usize = 1000;
const RECIPROCITY_MAX_NORM: u64 = 500;
const SPLIT_BOUND: u64 = 100_000;
const ORACLE_PQMAX: u64 = 20_000;
const SAMPLED_PAIRS: usize = 1000;
const DECOMPOSITION_X: u64 = 100_000;
const CHOICE_PQMAX: u64 = 10_000;
const CENSUS_X: u64 = 10_000_000;
const CENSUS_CHECKPOINTS: u32 = 10;
const SEED: u64 = 1;

const LIMIT_KEY: Duration = Duration::from_secs(120);
const LIMIT_RECIPROCITY: Duration = Duration::from_secs(120);
const LIMIT_PROP4RANK: Duration = Duration::from_secs(600);
const LIMIT_CENSUS: Duration = Duration::from_secs(1800);

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
    limit: Option<Duration>,
}

impl Outcome {
    fn new(pass: bool, summary: String) -> Self {
        Self { pass, summary, notes: Vec::new(), limit: None }
    }

    fn note(mut self, n: String) -> Self {
        self.notes.push(n);
        self
    }

    fn within(mut self, limit: Duration) -> Self {
        self.limit = Some(limit);
        self
    }
}

fn config() -> VerifyConfig {
    VerifyConfig {
        rings: RingTag::ALL.to_vec(),
        suites: Vec::new(),
        max_norm: None,
        pqmax: ORACLE_PQMAX,
        sample_oracle: true,
        seed: SEED,
        samples: SAMPLED_PAIRS,
        split_bound: SPLIT_BOUND,
        decomposition_x: DECOMPOSITION_X,
        choice_pqmax: CHOICE_PQMAX,
    }
}

fn suite(name: &str, cfg: &VerifyConfig) -> Outcome {
    let r = run_suite(name, cfg);
    let mut o = Outcome::new(r.passed, format!("{} checks, {} failures", r.checked, r.failures));
    for e in &r.failure_examples {
        o = o.note(e.clone());
    }
    o
}

fn detail(r: &SuiteReport, key: &str) -> String {
    r.details.get(key).map_or_else(|| "?".into(), |v| v.to_string())
}

fn c1() -> Outcome {
    let cfg = VerifyConfig { max_norm: Some(KEY_MAX_NORM), samples: KEY_RANDOM_PAIRS, ..config() };
    let r = run_suite("keycancellation", &cfg);
    Outcome::new(
        r.passed,
        format!(
            "{} exhaustive pairs (Z[i] {}, Z[√2] {}) plus {} random, {} failures",
            r.checked as usize - 2 * KEY_RANDOM_PAIRS,
            detail(&r, "d=-4:exhaustive_pairs"),
            detail(&r, "d=8:exhaustive_pairs"),
            2 * KEY_RANDOM_PAIRS,
            r.failures
        ),
    )
    .within(LIMIT_KEY)
}

fn c2() -> Outcome {
    let cfg = VerifyConfig { max_norm: Some(RECIPROCITY_MAX_NORM), ..config() };
    suite("reciprocitylem", &cfg).within(LIMIT_RECIPROCITY)
}

fn c3() -> Outcome {
    let r = run_suite("SteResult", &config());
    Outcome::new(
        r.passed,
        format!(
            "{} generators compared, {} failures",
            r.checked - parse(&detail(&r, "d=-4:generators_without_square_class")),
            r.failures
        ),
    )
    .note(format!(
        "d=-4, p ≡ 5 mod 8: {} generators confirmed to have no square-class associate",
        detail(&r, "d=-4:generators_without_square_class")
    ))
}

fn parse(s: &str) -> u64 {
    s.parse().unwrap_or(0)
}

fn c4() -> Outcome {
    suite("prop4rank", &config()).within(LIMIT_PROP4RANK)
}

fn c5() -> Outcome {
    let r = run_suite("algebra", &config());
    let mut o = Outcome::new(r.passed, format!("{} pairs checked, {} predicted Yes with rk8 = 0", r.checked, r.failures));
    for ring in ["d=-4", "d=8"] {
        o = o.note(format!(
            "{ring}: exhaustive {} pairs ({} Yes), sampled {} pairs ({} Yes)",
            detail(&r, &format!("{ring}:exhaustive_pairs")),
            detail(&r, &format!("{ring}:exhaustive_predicted_yes")),
            detail(&r, &format!("{ring}:sampled_pairs")),
            detail(&r, &format!("{ring}:sampled_predicted_yes")),
        ));
    }
    o
}

fn c6() -> Outcome {
    suite("decomposition", &config())
}

fn c7() -> Outcome {
    suite("heuristics", &config())
}

fn census(ring: RingTag) -> CensusReport {
    let cfg = CensusConfig { ring, x_max: CENSUS_X, checkpoints: CENSUS_CHECKPOINTS, oracle_cutoff: DEFAULT_ORACLE_CUTOFF };
    run_census(&cfg).expect("census configuration is valid")
}

fn c8() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for ring in RingTag::ALL {
        let rep = census(ring);
        let tol = Tolerances::for_ring(ring);
        let last = rep.rows.last().expect("at least one checkpoint");
        let ratio = last.ratio_pred.unwrap_or(f64::NAN);
        let (lo, hi) = tol.ratio_pred_band;
        let band_ok = (lo..=hi).contains(&ratio);
        let scale_lo = tol.scale_target / tol.scale_factor;
        let scale_hi = tol.scale_target * tol.scale_factor;
        let scale_ok = (scale_lo..=scale_hi).contains(&last.ratio_vs_scale);
        let invariants = rep.invariant_failures();
        pass &= band_ok && scale_ok && invariants.is_empty();
        let bound = 1.0 / ring.d().unsigned_abs() as f64;
        let p = bound;
        let sigma = (p * (1.0 - p) / last.n_rk4_2 as f64).sqrt();
        notes.push(format!(
            "d={}: (a) ratio_pred = {}/{} = {ratio:.4} in [{lo}, {hi}]: {}",
            ring.d(),
            last.n_pred_yes,
            last.n_rk4_2,
            verdict(band_ok)
        ));
        notes.push(format!(
            "d={}: (b) n_rk4_2/(X log log X/log X) = {:.6} in [{scale_lo:.6}, {scale_hi:.6}]: {}",
            ring.d(),
            last.ratio_vs_scale,
            verdict(scale_ok)
        ));
        notes.push(format!(
            "d={}: ratio_pred {} 1/|d| = {bound} (difference {:+.4}, binomial σ ≈ {sigma:.4})",
            ring.d(),
            if ratio >= bound { "≥" } else { "<" },
            ratio - bound
        ));
        notes.extend(invariants.into_iter().map(|f| format!("d={}: {f}", ring.d())));
    }
    let mut o = Outcome::new(pass, format!("X = {CENSUS_X}")).within(LIMIT_CENSUS);
    o.notes = notes;
    o
}

fn c9() -> Outcome {
    suite("choiceindependence", &config())
}

fn c10() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for ring in RingTag::ALL {
        let rows = b0_rows(&bilinear_scan(&ScanConfig::decay(ring)));
        let ok = rows.len() == 4 && strictly_decreasing(&rows);
        pass &= ok;
        let series: Vec<String> = rows
            .iter()
            .map(|r| format!("2^{}: |B0| = {}, normalized {:.3e}", r.m.trailing_zeros(), r.value.abs(), r.normalized))
            .collect();
        let word = if ok { "strictly decreasing" } else { "not strictly decreasing" };
        notes.push(format!("d={}: {word}: {}", ring.d(), series.join("; ")));
        if let Some(fit) = fit_decay_exponent(&rows) {
            notes.push(format!(
                "d={}: fitted exponent {:.3} ± {:.3} over {} points (95% band [{:.3}, {:.3}])",
                ring.d(),
                fit.slope,
                fit.stderr,
                fit.points,
                fit.band.0,
                fit.band.1
            ));
        }
    }
    let mut o = Outcome::new(pass, "normalized |B0| over M = N ∈ {2^10, 2^12, 2^14, 2^16}, Δ = 1/8".into());
    o.notes = notes;
    o
}

fn cli(threads: usize, args: &[&str]) -> (i32, Vec<u8>) {
    let t = threads.to_string();
    let argv = ["eightrank", "--threads", &t].into_iter().chain(args.iter().copied());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = eightrank_cli::run(argv, &mut out, &mut err);
    (code, out)
}

fn c11() -> Outcome {
    let commands: [&[&str]; 10] = [
        &["verify", "--suite", "keycancellation", "--max-norm", "80", "--samples", "100"],
        &["verify", "--suite", "algebra", "--oracle", "--samples", "100", "--pqmax", "5000"],
        &["verify", "--suite", "deltafactor", "--suite", "sumQi", "--suite", "generalBsum"],
        &["pair", "--d", "8", "-p", "17", "-q", "89", "--oracle"],
        &["census", "--d", "-4", "--xmax", "2000000", "--checkpoints", "10"],
        &["census", "--d", "8", "--xmax", "2000000", "--checkpoints", "10", "--format", "json"],
        &["charsum", "scan", "--d", "8", "--coefficients", "signs", "--seed", "7", "--format", "json"],
        &["charsum", "key", "--d", "8", "--w1", "7,2", "--w2", "-5,-2"],
        &["charsum", "delta", "--d", "8"],
        &["oracle", "--d", "8", "-p", "73", "-q", "89"],
    ];
    let threads = [1usize, 2, 8];
    let mut pass = true;
    let mut notes = Vec::new();
    for args in commands {
        let reference = cli(threads[0], args);
        let mut same = reference.0 == 0 && !reference.1.is_empty();
        for &t in &threads {
            let again = cli(t, args);
            same &= again == reference;
        }
        pass &= same;
        if !same {
            notes.push(format!("differs or failed: {}", args.join(" ")));
        }
    }
    Outcome::new(pass, format!("{} commands × threads {:?} plus a repeat, byte-identical", commands.len(), threads))
        .note(notes.join("; "))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "out of range"
    }
}

/// Runs every criterion, printing one line each plus indented notes.
/// Returns the numbers of the failed criteria.
pub fn run_all() -> Vec<u32> {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "key cancellation identity", c1),
        (2, "reciprocity γ(w,z)γ(z,w) = μ(wz)", c2),
        (3, "χ_𝔱 symbol vs square class mod 𝔱⁵", c3),
        (4, "4-rank criterion vs oracle", c4),
        (5, "rk8 prediction soundness vs oracle", c5),
        (6, "decomposition identity", c6),
        (7, "Cohen–Lenstra arithmetic", c7),
        (8, "census targets", c8),
        (9, "choice independence", c9),
        (10, "bilinear decay", c10),
        (11, "determinism", c11),
    ];
    let mut failed = Vec::new();
    for (n, title, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("aborted: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = outcome.limit.is_none_or(|l| elapsed <= l);
        let pass = outcome.pass && in_time;
        let limit = outcome.limit.map_or(String::new(), |l| format!(" ≤ {} s", l.as_secs()));
        println!(
            "criterion {n:>2} {}  {title}: {} [{:.1} s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.summary,
            elapsed.as_secs_f64()
        );
        for note in outcome.notes.iter().filter(|n| !n.is_empty()) {
            println!("               {note}");
        }
        if !pass {
            failed.push(n);
        }
    }
    failed
}
