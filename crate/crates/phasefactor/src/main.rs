//! Command-line entry point: factor integers, dump circuits and exact
//! distributions, and verify the toolkit against its classical oracles
//! and the bundled reference tables.

use std::path::PathBuf;
use std::process::exit;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use phasefactor::circuit;
use phasefactor::driver::{self, Backend, RunConfig, StopPolicy};
use phasefactor::error::Error;
use phasefactor::modexp::{build_shor_circuit, circuit_params};
use phasefactor::oracle;
use phasefactor::report::{distribution_csv, headline_divisors, ReportDocument};
use phasefactor::state::qubit_cap;

const TABLE1_FIXTURE: &str = include_str!("../fixtures/table1.csv");
const TABLE3_FIXTURE: &str = include_str!("../fixtures/table3.csv");

#[derive(Parser)]
#[command(
    name = "phasefactor",
    version,
    about = "Factor integers by phase sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor an odd integer and report the divisors found.
    Factor(FactorArgs),
    /// Emit the exact upper-register distribution for an (n, a) instance.
    Dist(DistArgs),
    /// Replay reference tables and run the built-in cross-checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FactorArgs {
    /// Odd integer to factor.
    n: String,
    /// Fixed base; omit to draw one per run from [2, n-1].
    #[arg(long)]
    a: Option<String>,
    /// Samples per run.
    #[arg(long, default_value_t = 150)]
    shots: u64,
    /// Independent runs (run r seeds its RNG with seed + r).
    #[arg(long, default_value_t = 1)]
    runs: u32,
    /// RNG seed; omitted means a random seed, echoed in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Stopping policy: first | count:<k> | exhaust.
    #[arg(long, default_value = "first")]
    policy: String,
    /// Phase source: sim | injector.
    #[arg(long, default_value = "sim")]
    backend: String,
    /// Override the lower-register width (default: minimal for the base).
    #[arg(long = "lower-bits")]
    lower_bits: Option<usize>,
    /// Record gcd(a, n) immediately when it is nontrivial.
    #[arg(long = "gcd-shortcut")]
    gcd_shortcut: bool,
    /// Write the JSON report document here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write per-sample CSV rows here.
    #[arg(long)]
    rows: Option<PathBuf>,
    /// Write the run-1 circuit in text form here (sim backend).
    #[arg(long = "dump-circuit")]
    dump_circuit: Option<PathBuf>,
    /// Write the run-1 exact distribution CSV here (sim backend).
    #[arg(long = "emit-dist")]
    emit_dist: Option<PathBuf>,
    /// Print one log line per sample in the classic field order.
    #[arg(long = "paper-log")]
    paper_log: bool,
}

#[derive(Args)]
struct DistArgs {
    /// Odd integer defining the instance.
    n: u64,
    /// Base of the instance.
    #[arg(long)]
    a: u64,
    #[arg(long = "lower-bits")]
    lower_bits: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run: table1 | table3 | ladder | qft.
    suite: String,
    /// External fixture file replacing the bundled table.
    #[arg(long)]
    fixture: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    exit(0);
                }
                _ => {
                    eprint!("{e}");
                    exit(1);
                }
            }
        }
    };
    let code = match cli.command {
        Command::Factor(args) => cmd_factor(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Verify(args) => cmd_verify(args),
    };
    exit(code);
}

fn fail(e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {e}");
    1
}

fn parse_policy(s: &str) -> Result<StopPolicy, String> {
    match s {
        "first" => Ok(StopPolicy::FirstNontrivial),
        "exhaust" => Ok(StopPolicy::Exhaust),
        _ => match s.strip_prefix("count:").and_then(|k| k.parse().ok()) {
            Some(k) if k > 0 => Ok(StopPolicy::TargetCount(k)),
            _ => Err(format!(
                "bad policy `{s}` (expected first, count:<k>, or exhaust)"
            )),
        },
    }
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "sim" => Ok(Backend::Simulator),
        "injector" => Ok(Backend::Injector),
        _ => Err(format!("bad backend `{s}` (expected sim or injector)")),
    }
}

fn cmd_factor(args: FactorArgs) -> i32 {
    let n: BigUint = match args.n.parse() {
        Ok(n) => n,
        Err(_) => return fail(format!("cannot parse `{}` as an integer", args.n)),
    };
    let a = match &args.a {
        Some(s) => match s.parse::<BigUint>() {
            Ok(a) => Some(a),
            Err(_) => return fail(format!("cannot parse base `{s}`")),
        },
        None => None,
    };
    let policy = match parse_policy(&args.policy) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let backend = match parse_backend(&args.backend) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let config = RunConfig {
        n,
        a,
        shots: args.shots,
        runs: args.runs,
        seed: args.seed.unwrap_or_else(rand::random),
        policy,
        backend,
        gcd_shortcut: args.gcd_shortcut,
        lower_bits: args.lower_bits,
    };

    let report = match driver::run(&config) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let doc = ReportDocument::from_report(&report);

    println!(
        "n = {}  backend = {}  policy = {}  seed = {}",
        doc.config.n, doc.config.backend, doc.config.policy, doc.config.seed
    );
    match (doc.config.lower_bits, doc.config.total_qubits) {
        (Some(lo), Some(total)) => println!(
            "layout: p = {}, n = {}, qubits = {}",
            doc.config.upper_bits, lo, total
        ),
        _ => println!(
            "layout: p = {}, n per-run (random base)",
            doc.config.upper_bits
        ),
    }
    for diag in &doc.diagnostics {
        eprintln!("note: {diag}");
    }
    if args.paper_log {
        for row in &doc.rows {
            if row.phase.is_none() {
                continue;
            }
            let a_bits = row
                .a
                .parse::<BigUint>()
                .map(|a| a.bits() as usize)
                .unwrap_or(0);
            let qubits = doc.config.upper_bits + doc.config.lower_bits.unwrap_or(a_bits);
            let (d1, d2) = headline_divisors(row, &report.config.n);
            let nd1 = (&report.config.n / d1.parse::<BigUint>().unwrap()).to_string();
            let nd2 = (&report.config.n / d2.parse::<BigUint>().unwrap()).to_string();
            println!(
                "{} - l= {} nb qubits: {} rep= {} a= {} phi= {} {} {} {} {}",
                row.run,
                row.l.as_deref().unwrap_or("0"),
                qubits,
                row.run,
                row.a,
                row.phase.as_deref().unwrap_or("0"),
                d1,
                d2,
                nd1,
                nd2,
            );
        }
    }
    let divisors = doc.divisors.join(", ");
    let nontrivial = doc.nontrivial_divisors.join(", ");
    println!("samples processed: {}", doc.rows.len());
    println!(
        "divisors: {}",
        if divisors.is_empty() { "-" } else { &divisors }
    );
    println!(
        "nontrivial: {}",
        if nontrivial.is_empty() {
            "-"
        } else {
            &nontrivial
        }
    );
    eprintln!("wall-clock: {} ms", report.runtime.as_millis());

    if let Some(path) = &args.report {
        let json = match doc.to_json() {
            Ok(j) => j,
            Err(e) => return fail(e),
        };
        if let Err(e) = std::fs::write(path, json) {
            return fail(e);
        }
    }
    if let Some(path) = &args.rows {
        if let Err(e) = std::fs::write(path, doc.rows_csv()) {
            return fail(e);
        }
    }
    if args.dump_circuit.is_some() || args.emit_dist.is_some() {
        if let Err(e) = write_run1_artifacts(&args, &report) {
            return fail(e);
        }
    }

    if doc.nontrivial_divisors.is_empty() {
        2
    } else {
        0
    }
}

/// Rebuild the run-1 circuit for --dump-circuit / --emit-dist.
fn write_run1_artifacts(
    args: &FactorArgs,
    report: &driver::FactorizationReport,
) -> phasefactor::Result<()> {
    if report.config.backend != Backend::Simulator {
        eprintln!("note: --dump-circuit/--emit-dist apply to the sim backend only; skipped");
        return Ok(());
    }
    let a = match report.records.first() {
        Some(r) => r.a.clone(),
        None => {
            eprintln!("note: no samples recorded; nothing to dump");
            return Ok(());
        }
    };
    let n64 = report
        .config
        .n
        .to_u64()
        .expect("sim backend modulus fits u64");
    let a64 = a.to_u64().expect("base below modulus fits u64");
    let spec = circuit_params(n64, a64, report.config.lower_bits)?;
    let (circuit, map) = build_shor_circuit(&spec)?;
    if let Some(path) = &args.dump_circuit {
        std::fs::write(path, circuit.to_text())?;
    }
    if let Some(path) = &args.emit_dist {
        let dist = circuit.execute()?.exact_probabilities(map.upper)?;
        std::fs::write(path, distribution_csv(&dist))?;
    }
    Ok(())
}

fn cmd_dist(args: DistArgs) -> i32 {
    let spec = match circuit_params(args.n, args.a, args.lower_bits) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if spec.width() > qubit_cap() {
        return fail(Error::QubitCapExceeded {
            required: spec.width(),
            cap: qubit_cap(),
            amplitudes: 1u128 << spec.width().min(127),
        });
    }
    eprintln!(
        "n = {}, a = {}: p = {}, n = {}, qubits = {}",
        args.n,
        args.a,
        spec.upper_bits(),
        spec.lower_bits(),
        spec.width()
    );
    let dist = match build_shor_circuit(&spec)
        .and_then(|(c, map)| c.execute()?.exact_probabilities(map.upper))
    {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let csv = distribution_csv(&dist);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, csv) {
                return fail(e);
            }
        }
        None => print!("{csv}"),
    }
    0
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let fixture_text = |bundled: &'static str| -> Result<String, Error> {
        match &args.fixture {
            Some(path) => Ok(std::fs::read_to_string(path)?),
            None => Ok(bundled.to_string()),
        }
    };
    let outcome = match args.suite.as_str() {
        "table1" => fixture_text(TABLE1_FIXTURE).and_then(|t| verify_table1(&t)),
        "table3" => fixture_text(TABLE3_FIXTURE).and_then(|t| verify_table3(&t)),
        "ladder" => verify_ladder(),
        "qft" => verify_qft(),
        other => {
            return fail(format!(
                "unknown suite `{other}` (expected table1, table3, ladder, or qft)"
            ))
        }
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => fail(e),
    }
}

struct Table1Row {
    n: u64,
    declared: usize,
    divisors: Vec<u64>,
}

fn parse_table1(text: &str) -> Result<Vec<Table1Row>, Error> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::FixtureParse {
            name: "table1".into(),
            line: idx + 1,
            msg: msg.into(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad("expected 3 comma-separated fields"));
        }
        let n = fields[0].parse().map_err(|_| bad("bad n"))?;
        let declared = fields[1].parse().map_err(|_| bad("bad count"))?;
        let divisors = fields[2]
            .split(';')
            .map(|d| d.parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad divisor list"))?;
        rows.push(Table1Row {
            n,
            declared,
            divisors,
        });
    }
    Ok(rows)
}

/// A published row is self-consistent when its list has no duplicates,
/// matches its declared count, and is closed under d -> n/d. Rows failing
/// that are reported as errata; self-consistent rows must match
/// trial-division factorization exactly.
fn verify_table1(text: &str) -> Result<bool, Error> {
    let rows = parse_table1(text)?;
    let mut ok = 0;
    let mut errata = 0;
    let mut failed = 0;
    for row in &rows {
        let mut sorted = row.divisors.clone();
        sorted.sort_unstable();
        let deduped = sorted.windows(2).all(|w| w[0] != w[1]);
        let paired = sorted
            .iter()
            .zip(sorted.iter().rev())
            .all(|(a, b)| a.checked_mul(*b) == Some(row.n));
        let consistent = deduped && paired && row.declared == row.divisors.len();
        let computed = oracle::trial_factor(row.n)?;
        if computed.divisors() == sorted.as_slice() && consistent {
            println!("ok      {}: {} divisors", row.n, sorted.len());
            ok += 1;
        } else if !consistent {
            println!(
                "errata  {}: published list is self-inconsistent; trial division finds {:?}",
                row.n,
                computed.divisors()
            );
            errata += 1;
        } else {
            println!(
                "FAIL    {}: published {:?} vs computed {:?}",
                row.n,
                sorted,
                computed.divisors()
            );
            failed += 1;
        }
    }
    println!("table1: {ok} verified, {errata} errata, {failed} failed");
    Ok(failed == 0)
}

fn verify_table3(text: &str) -> Result<bool, Error> {
    let n = BigUint::from(1591u32);
    let a = BigUint::from(2u32);
    let mut ok = 0;
    let mut failed = 0;
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::FixtureParse {
            name: "table3".into(),
            line: idx + 1,
            msg,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad("expected 6 comma-separated fields".into()));
        }
        let phase: f64 = fields[0]
            .parse()
            .map_err(|_| bad(format!("bad phase `{}`", fields[0])))?;
        let l: u64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad l `{}`", fields[1])))?;
        let d: Vec<u64> = fields[2..6]
            .iter()
            .map(|f| f.parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad divisor field".into()))?;
        if d[0] * d[2] != 1591 || d[1] * d[3] != 1591 {
            return Err(bad(format!(
                "divisor/cofactor pair does not multiply to 1591: {line}"
            )));
        }
        let computed_l = driver::phase_to_l(phase, &n)?;
        let divisors = driver::postprocess(&computed_l, &a, &n)?;
        let expected: std::collections::BTreeSet<BigUint> =
            [BigUint::from(d[0]), BigUint::from(d[1])].into();
        let l_ok = computed_l == BigUint::from(l);
        let d_ok = divisors == expected;
        if l_ok && d_ok {
            println!(
                "ok      phase {} -> l = {l}, divisors {{{}, {}}}",
                fields[0], d[0], d[1]
            );
            ok += 1;
        } else {
            println!(
                "FAIL    phase {}: l {} vs {l}, divisors {:?} vs {:?}",
                fields[0], computed_l, divisors, expected
            );
            failed += 1;
        }
    }
    println!("table3: {ok} rows replayed, {failed} failed");
    Ok(failed == 0)
}

/// Exhaustive accumulator check over every instance with p ≤ 4, n ≤ 4
/// and every upper basis state.
fn verify_ladder() -> Result<bool, Error> {
    let mut cases = 0u64;
    let mut failed = 0u64;
    for modulus in (3..=13u64).step_by(2) {
        for base in 2..modulus {
            for lower in 1..=4usize {
                let spec = circuit_params(modulus, base, Some(lower))?;
                assert!(spec.upper_bits() <= 4);
                let constants = phasefactor::modexp::phase_constants(&spec);
                let ladder = phasefactor::modexp::build_ladder(&spec)?;
                for l in 0..spec.q() {
                    let mut c = circuit::Circuit::new(spec.width())?;
                    for j in 0..spec.upper_bits() {
                        if (l >> j) & 1 == 1 {
                            c.push(circuit::Gate::x(j))?;
                        }
                    }
                    c.extend(&ladder)?;
                    let dist = c.execute()?.exact_probabilities(spec.lower_register())?;
                    let expected: u64 = constants
                        .iter()
                        .filter(|pc| (l >> pc.block) & 1 == 1)
                        .map(|pc| pc.quantized)
                        .sum::<u64>()
                        % (1 << spec.lower_bits());
                    cases += 1;
                    if dist.prob(expected) < 1.0 - 1e-9 {
                        println!(
                            "FAIL    n={modulus} a={base} lower={lower} l={l}: P({expected}) = {}",
                            dist.prob(expected)
                        );
                        failed += 1;
                    }
                }
            }
        }
    }
    println!("ladder: {cases} cases checked, {failed} failed");
    Ok(failed == 0)
}

fn verify_qft() -> Result<bool, Error> {
    let mut max_err = 0.0f64;
    for p in 1..=5usize {
        let got = circuit::qft(p)?.unitary_matrix()?;
        let want = oracle::dft_matrix(p, false);
        let mut err = 0.0f64;
        for (gr, wr) in got.iter().zip(&want) {
            for (g, w) in gr.iter().zip(wr) {
                err = err.max((g - w).norm());
            }
        }
        println!("qft p={p}: max entry error {err:.3e}");
        max_err = max_err.max(err);
    }
    println!("qft: max entry error {max_err:.3e} (tolerance 1e-10)");
    Ok(max_err < 1e-10)
}
