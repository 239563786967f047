//! Command-line front end: verification suites, single-pair dossiers, the
//! census, the character-sum lab and the class-group oracle.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use eightrank::census::{run_census, CensusConfig, DEFAULT_ORACLE_CUTOFF, DEFAULT_XMAX_CAP};
use eightrank::charsum::{
    bilinear_scan, delta_table, fit_decay_exponent, key_cancellation_sum, Coefficients,
    ScanConfig, ScanMode,
};
use eightrank::classgroup::{narrow_class_group, ClassGroupError};
use eightrank::criteria::{build_pair, CriteriaError, Prediction};
use eightrank::verify::{b0_rows, verify_all, VerifyConfig, SUITES};
use eightrank::{Elem, Rational, RingTag};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "eightrank", version, about = "2-power ranks of narrow class groups of Q(√(dpq)), d ∈ {−4, 8}")]
pub struct Cli {
    /// Worker threads (0 = all cores); outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the invariant suites and print a JSON report.
    Verify(VerifyArgs),
    /// Print the symbol dossier of one pair (p, q).
    Pair(PairArgs),
    /// Count pairs under the hyperbola pq ≤ X.
    Census(CensusArgs),
    /// Character sums: the key identity, bilinear scans and the δ table.
    Charsum(CharsumArgs),
    /// Class group structure from binary quadratic forms.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write the payload here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Restrict to one ring (both by default).
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring)]
    pub d: Option<RingTag>,
    /// Suite to run; repeatable. All suites by default.
    #[arg(long = "suite", value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    pub suites: Vec<String>,
    /// Norm bound for keycancellation (default 150) and reciprocitylem (default 500).
    #[arg(long)]
    pub max_norm: Option<u64>,
    /// Bound on pq for exhaustive oracle comparisons.
    #[arg(long, default_value_t = 20_000)]
    pub pqmax: u64,
    /// Also compare against the oracle on random rk4 = 2 pairs with pq ≤ 10⁶.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random pairs per sampled check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring)]
    pub d: RingTag,
    #[arg(short = 'p')]
    pub p: u64,
    #[arg(short = 'q')]
    pub q: u64,
    /// Add the class-group ranks of CL(dpq).
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring)]
    pub d: RingTag,
    #[arg(long, default_value_t = 1_000_000)]
    pub xmax: u64,
    #[arg(long, default_value_t = 10)]
    pub checkpoints: u32,
    /// Fill the oracle columns for checkpoints up to this X.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CUTOFF)]
    pub oracle_cutoff: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct CharsumArgs {
    #[command(subcommand)]
    pub command: CharsumCommand,
}

#[derive(Subcommand, Debug)]
pub enum CharsumCommand {
    /// Evaluate Σ γ(w₁, z)γ(w₂, z) over Z[√d₀]/(W) against its closed form.
    Key(KeyArgs),
    /// Exact bilinear sums B₀ and Q over dyadic windows.
    Scan(ScanArgs),
    /// The table of δ with γ(w, z) = δ·γ(z, w) by class.
    Delta(DeltaArgs),
}

#[derive(Args, Debug)]
pub struct KeyArgs {
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring)]
    pub d: RingTag,
    /// First element as `a,b` meaning a + b√d₀.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub w1: (i64, i64),
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub w2: (i64, i64),
    #[command(flatten)]
    pub out: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoefficientKind {
    /// 1 on every prime-supported element.
    Ones,
    /// Seeded random signs on prime-supported elements.
    Signs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring)]
    pub d: RingTag,
    /// Exponents k with M = N = 2^k.
    #[arg(long, value_delimiter = ',', default_values_t = [10u32, 12, 14, 16])]
    pub exponents: Vec<u32>,
    /// Window width Δ as a fraction.
    #[arg(long, default_value = "1/8", value_parser = parse_delta)]
    pub delta: Rational,
    #[arg(long, value_enum, default_value_t = CoefficientKind::Ones)]
    pub coefficients: CoefficientKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring)]
    pub d: RingTag,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Fundamental discriminant.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["d", "p", "q"], required_unless_present = "d")]
    pub disc: Option<i64>,
    #[arg(long = "d", allow_hyphen_values = true, value_parser = parse_ring, requires_all = ["p", "q"])]
    pub d: Option<RingTag>,
    #[arg(short = 'p')]
    pub p: Option<u64>,
    #[arg(short = 'q')]
    pub q: Option<u64>,
    #[command(flatten)]
    pub out: Output,
}

fn parse_ring(s: &str) -> Result<RingTag, String> {
    let d: i64 = s.parse().map_err(|_| format!("expected -4 or 8, got {s}"))?;
    RingTag::from_d(d).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got {s}"))?;
    let p = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_delta(s: &str) -> Result<Rational, String> {
    let r: Rational = s.parse().map_err(|_| format!("expected a fraction like 1/8, got {s}"))?;
    if r <= Rational::from_integer(0) || r >= Rational::from_integer(1) {
        return Err(format!("Δ must lie in (0, 1), got {s}"));
    }
    Ok(r)
}

/// How a command ended, short of success.
#[derive(Debug)]
pub enum Failure {
    /// Bad input; exit 2.
    Usage(String),
    /// Invariant violation; the report goes to standard error; exit 1.
    Violation(Value),
}

impl From<CriteriaError> for Failure {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::ConsistencyViolation(m) => Failure::Violation(violation(vec![m])),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn violation(failures: Vec<String>) -> Value {
    json!({ "passed": false, "failures": failures })
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable payload");
    s.push(b'\n');
    s
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Usage(e.to_string()))
}

/// The payload and, when it reports a failure itself, that fact.
struct Payload {
    bytes: Vec<u8>,
    failed: bool,
}

impl Payload {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, failed: false }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let target = output_path(&cli.command);
    let result = pool.install(|| execute(&cli.command, err));
    let (payload, code) = match result {
        Ok(p) => {
            let code = if p.failed { EXIT_VIOLATION } else { EXIT_OK };
            (Some(p.bytes), code)
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            (None, EXIT_USAGE)
        }
        Err(Failure::Violation(v)) => {
            let _ = err.write_all(&to_json(&v));
            (None, EXIT_VIOLATION)
        }
    };
    if let Some(bytes) = payload {
        let written = match target {
            Some(path) => std::fs::write(path, &bytes),
            None => out.write_all(&bytes),
        };
        if let Err(e) = written {
            let _ = writeln!(err, "error: cannot write output: {e}");
            return EXIT_USAGE;
        }
    }
    code
}

fn output_path(c: &Command) -> Option<&PathBuf> {
    match c {
        Command::Verify(a) => a.out.output.as_ref(),
        Command::Pair(a) => a.out.output.as_ref(),
        Command::Census(a) => a.out.output.as_ref(),
        Command::Oracle(a) => a.out.output.as_ref(),
        Command::Charsum(a) => match &a.command {
            CharsumCommand::Key(k) => k.out.output.as_ref(),
            CharsumCommand::Scan(s) => s.out.output.as_ref(),
            CharsumCommand::Delta(d) => d.out.output.as_ref(),
        },
    }
}

fn execute(c: &Command, err: &mut (dyn Write + Send)) -> Result<Payload, Failure> {
    match c {
        Command::Verify(a) => cmd_verify(a, err),
        Command::Pair(a) => cmd_pair(a),
        Command::Census(a) => cmd_census(a, err),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Charsum(a) => match &a.command {
            CharsumCommand::Key(k) => cmd_key(k),
            CharsumCommand::Scan(s) => cmd_scan(s, err),
            CharsumCommand::Delta(d) => cmd_delta(d),
        },
    }
}

fn rings(d: Option<RingTag>) -> Vec<RingTag> {
    d.map_or_else(|| RingTag::ALL.to_vec(), |r| vec![r])
}

fn cmd_verify(a: &VerifyArgs, err: &mut (dyn Write + Send)) -> Result<Payload, Failure> {
    let cfg = VerifyConfig {
        rings: rings(a.d),
        suites: a.suites.clone(),
        max_norm: a.max_norm,
        pqmax: a.pqmax,
        sample_oracle: a.oracle,
        seed: a.seed,
        samples: a.samples,
        ..VerifyConfig::default()
    };
    let _ = writeln!(err, "verify: rings {:?}, suites {:?}", cfg.rings, if cfg.suites.is_empty() { SUITES.to_vec() } else { cfg.suites.iter().map(String::as_str).collect() });
    let report = verify_all(&cfg);
    for s in &report.suites {
        let _ = writeln!(err, "  {:<20} {} ({} checks, {} failures)", s.suite, if s.passed { "pass" } else { "FAIL" }, s.checked, s.failures);
    }
    Ok(Payload { bytes: to_json(&report), failed: !report.passed })
}

fn rank_fields(disc: i64) -> Result<Value, Failure> {
    let g = narrow_class_group(disc).map_err(|e| match e {
        ClassGroupError::NotFundamental(_) | ClassGroupError::BoundExceeded(..) => Failure::Usage(e.to_string()),
        e => Failure::Violation(violation(vec![format!("genustheory: {e}")])),
    })?;
    let r = g.rank_profile();
    Ok(json!({
        "discriminant": g.discriminant,
        "elementary_divisors": g.elementary_divisors,
        "order": g.order,
        "rk2": r.rk2,
        "rk4": r.rk4,
        "rk8": r.rk8,
    }))
}

#[derive(Serialize)]
struct WithOracle<'a> {
    #[serde(flatten)]
    pair: &'a eightrank::criteria::PairRecord,
    oracle: Value,
}

fn cmd_pair(a: &PairArgs) -> Result<Payload, Failure> {
    let rec = build_pair(a.p, a.q, a.d)?;
    if !a.oracle {
        return Ok(Payload::ok(to_json(&rec)));
    }
    let disc = a.d.d() * (a.p * a.q) as i64;
    let ranks = rank_fields(disc)?;
    let rk8 = ranks["rk8"].as_u64().unwrap_or(0);
    let obj = WithOracle { pair: &rec, oracle: ranks };
    let failed = rec.prediction() == Prediction::Yes && rk8 == 0;
    Ok(Payload { bytes: to_json(&obj), failed })
}

fn cmd_census(a: &CensusArgs, err: &mut (dyn Write + Send)) -> Result<Payload, Failure> {
    if a.xmax > DEFAULT_XMAX_CAP {
        return Err(Failure::Usage(format!("--xmax {} exceeds the cap {DEFAULT_XMAX_CAP}", a.xmax)));
    }
    let cfg = CensusConfig { ring: a.d, x_max: a.xmax, checkpoints: a.checkpoints, oracle_cutoff: a.oracle_cutoff };
    let _ = writeln!(err, "census: d={} X={} checkpoints={}", a.d.d(), a.xmax, a.checkpoints);
    let report = run_census(&cfg)?;
    let failures = report.invariant_failures();
    let bytes = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(&report.rows)?,
    };
    if failures.is_empty() {
        Ok(Payload::ok(bytes))
    } else {
        let _ = err.write_all(&to_json(&violation(failures)));
        Ok(Payload { bytes, failed: true })
    }
}

fn cmd_oracle(a: &OracleArgs) -> Result<Payload, Failure> {
    let disc = match (a.disc, a.d, a.p, a.q) {
        (Some(disc), ..) => disc,
        (None, Some(r), Some(p), Some(q)) => r.d() * (p as i64).checked_mul(q as i64).ok_or_else(|| Failure::Usage("pq overflows".into()))?,
        _ => return Err(Failure::Usage("give --disc or --d with -p and -q".into())),
    };
    Ok(Payload::ok(to_json(&rank_fields(disc)?)))
}

fn cmd_key(a: &KeyArgs) -> Result<Payload, Failure> {
    let w1 = Elem::new(a.w1.0, a.w1.1, a.d);
    let w2 = Elem::new(a.w2.0, a.w2.1, a.d);
    let r = key_cancellation_sum(&w1, &w2).map_err(|e| Failure::Usage(e.to_string()))?;
    if r.holds() {
        Ok(Payload::ok(to_json(&r)))
    } else {
        let msg = format!("keycancellation: ({w1}, {w2}) measured {} expected ±{}", r.measured, r.predicted_abs);
        Err(Failure::Violation(json!({ "passed": false, "failures": [msg], "result": r })))
    }
}

fn cmd_scan(a: &ScanArgs, err: &mut (dyn Write + Send)) -> Result<Payload, Failure> {
    if let Some(k) = a.exponents.iter().find(|&&k| !(1..=30).contains(&k)) {
        return Err(Failure::Usage(format!("exponent {k} outside 1..=30")));
    }
    let cfg = ScanConfig {
        ring: a.d,
        exponents: a.exponents.clone(),
        delta: a.delta,
        coefficients: match a.coefficients {
            CoefficientKind::Ones => Coefficients::PrimeOnes,
            CoefficientKind::Signs => Coefficients::PrimeRandomSigns { seed: a.seed },
        },
        modes: vec![ScanMode::PrimitiveZB0, ScanMode::UnrestrictedZQ],
    };
    let _ = writeln!(err, "charsum scan: d={} exponents {:?} Δ={}", a.d.d(), a.exponents, a.delta);
    let rows = bilinear_scan(&cfg);
    let bytes = match a.format {
        Format::Csv => to_csv(&rows)?,
        Format::Json => to_json(&json!({
            "config": cfg,
            "rows": rows,
            "fit_b0": fit_decay_exponent(&b0_rows(&rows)),
        })),
    };
    Ok(Payload::ok(bytes))
}

fn cmd_delta(a: &DeltaArgs) -> Result<Payload, Failure> {
    let table = delta_table(a.d).map_err(|e| Failure::Violation(violation(vec![format!("deltafactor: {e}")])))?;
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|(c, e)| json!({ "class": c, "delta": e.delta, "samples": e.samples }))
        .collect();
    Ok(Payload::ok(to_json(&json!({
        "d": a.d.d(),
        "min_samples": table.min_samples(),
        "entries": entries,
    }))))
}
