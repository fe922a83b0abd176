//! End-to-end tests of the command-line surface: exit codes, file
//! artifacts, and the documented output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

use phasefactor::circuit::Circuit;
use phasefactor::modexp::circuit_params;
use phasefactor::oracle::analytic_distribution;
use phasefactor::report::ReportDocument;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_phasefactor")
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(exe()).args(args).output().unwrap()
}

fn tmpfile(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phasefactor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn factor_exit_zero_on_nontrivial_divisor() {
    let out = run_cli(&["factor", "15", "--a", "2", "--seed", "3", "--shots", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("layout: p = 5, n = 2, qubits = 7"));
}

#[test]
fn factor_exit_two_when_only_trivial() {
    // A prime modulus can only yield 1 and n.
    let out = run_cli(&[
        "factor",
        "17",
        "--a",
        "3",
        "--backend",
        "injector",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("prime"), "stderr: {stderr}");
}

#[test]
fn factor_exit_one_on_even_modulus() {
    let out = run_cli(&["factor", "16"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("odd"), "stderr: {stderr}");
}

#[test]
fn factor_exit_one_on_unparseable_or_bad_flags() {
    assert_eq!(run_cli(&["factor", "15x"]).status.code(), Some(1));
    assert_eq!(
        run_cli(&["factor", "15", "--policy", "bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run_cli(&["factor", "15", "--backend", "hw"]).status.code(),
        Some(1)
    );
    assert_eq!(run_cli(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run_cli(&["--help"]).status.code(), Some(0));
    assert_eq!(run_cli(&["--version"]).status.code(), Some(0));
}

#[test]
fn factor_cap_error_names_required_qubits() {
    let out = run_cli(&["factor", "1099511627777", "--a", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("43 qubits"), "stderr: {stderr}");
}

#[test]
fn qubit_cap_env_var_lowers_the_limit() {
    // 1591 with base 2 needs 13 qubits; a cap of 10 must reject it.
    let out = Command::new(exe())
        .env("PHASEFACTOR_QUBIT_CAP", "10")
        .args(["factor", "1591", "--a", "2", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("13 qubits") && stderr.contains("cap of 10"),
        "stderr: {stderr}"
    );
}

#[test]
fn report_json_roundtrips_and_is_ordered() {
    let path = tmpfile("report.json");
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "2",
        "--seed",
        "11",
        "--shots",
        "40",
        "--policy",
        "exhaust",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = ReportDocument::from_json(&text).unwrap();
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.config.n, "15");
    assert_eq!(doc.config.a_policy, "fixed:2");
    assert_eq!(doc.rows.len(), 40);
    for w in doc.rows.windows(2) {
        assert!((w[0].run, w[0].sample) < (w[1].run, w[1].sample));
    }
    // Every row's phase is the exact rational m/q.
    for row in &doc.rows {
        let phase: f64 = row.phase.as_deref().unwrap().parse().unwrap();
        assert_eq!(phase * row.q.unwrap() as f64, row.m.unwrap() as f64);
    }
    assert_eq!(doc.to_json().unwrap(), text);
}

#[test]
fn rows_csv_matches_schema() {
    let path = tmpfile("rows.csv");
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "2",
        "--seed",
        "11",
        "--shots",
        "10",
        "--policy",
        "exhaust",
        "--rows",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run,a,phase,l,d1,d2,n_over_d1,n_over_d2"
    );
    assert_eq!(lines.count(), 10);
}

#[test]
fn dump_circuit_roundtrips_through_parser() {
    let path = tmpfile("circuit.txt");
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "2",
        "--seed",
        "5",
        "--shots",
        "5",
        "--dump-circuit",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = Circuit::parse_text(&text).unwrap();
    assert_eq!(parsed.width(), 7);
    assert_eq!(parsed.to_text(), text);
}

#[test]
fn dist_rows_are_exact_and_sorted() {
    let out = run_cli(&["dist", "15", "--a", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "m,phase,probability");
    assert_eq!(lines.len() - 1, 32); // q = 2^5 outcomes

    let spec = circuit_params(15, 2, None).unwrap();
    let reference = analytic_distribution(&spec).unwrap();
    let mut total = 0.0f64;
    for (i, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let m: u64 = fields[0].parse().unwrap();
        assert_eq!(m, i as u64);
        let p: f64 = fields[2].parse().unwrap();
        total += p;
        assert!((p - reference.prob(m)).abs() < 1e-8);
    }
    assert!((total - 1.0).abs() < 1e-6);
}

#[test]
fn dist_matches_emit_dist_artifact() {
    let path = tmpfile("dist.csv");
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "2",
        "--seed",
        "5",
        "--shots",
        "5",
        "--emit-dist",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let via_factor = std::fs::read_to_string(&path).unwrap();
    let via_dist = run_cli(&["dist", "15", "--a", "2"]);
    assert_eq!(via_factor, String::from_utf8_lossy(&via_dist.stdout));
}

#[test]
fn dist_rejects_oversized_instances() {
    let out = run_cli(&["dist", "67108865", "--a", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("qubits"), "stderr: {stderr}");
}

#[test]
fn paper_log_lines_have_the_field_order() {
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "2",
        "--seed",
        "3",
        "--shots",
        "3",
        "--policy",
        "exhaust",
        "--paper-log",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let log_lines: Vec<&str> = stdout.lines().filter(|l| l.contains(" - l= ")).collect();
    assert_eq!(log_lines.len(), 3);
    for line in log_lines {
        assert!(
            line.contains("nb qubits: 7") && line.contains("rep= 1") && line.contains("a= 2"),
            "line: {line}"
        );
        assert!(line.contains("phi= "), "line: {line}");
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["table1", "table3", "ladder", "qft"] {
        let out = run_cli(&["verify", suite]);
        assert_eq!(out.status.code(), Some(0), "suite {suite}");
    }
    assert_eq!(run_cli(&["verify", "nonsense"]).status.code(), Some(1));
}

#[test]
fn verify_rejects_missing_or_corrupt_fixture() {
    let out = run_cli(&["verify", "table3", "--fixture", "/nonexistent/fixture.csv"]);
    assert_eq!(out.status.code(), Some(1));

    // A row whose divisor/cofactor pair is inconsistent is named.
    let path = tmpfile("bad_table3.csv");
    std::fs::write(
        &path,
        "phase,l,d1,d2,n_over_d1,n_over_d2\n0.03515625,56,43,1,999,1591\n",
    )
    .unwrap();
    let out = run_cli(&["verify", "table3", "--fixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");

    // A wrong-but-well-formed row fails with a per-row diff.
    std::fs::write(
        &path,
        "phase,l,d1,d2,n_over_d1,n_over_d2\n0.03515625,57,43,1,37,1591\n",
    )
    .unwrap();
    let out = run_cli(&["verify", "table3", "--fixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"), "stdout: {stdout}");
}

#[test]
fn gcd_shortcut_flag_is_honored() {
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "5",
        "--backend",
        "injector",
        "--gcd-shortcut",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("nontrivial: 3, 5"), "stdout: {stdout}");

    // Without the shortcut the injector cannot use a non-coprime base.
    let out = run_cli(&[
        "factor",
        "15",
        "--a",
        "5",
        "--backend",
        "injector",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("coprime"), "stderr: {stderr}");
}

#[test]
fn factor_1591_simulator_distribution_emits_full_range() {
    // The 13-qubit flagship instance: write the exact distribution and
    // check its shape; the CSV covers all q = 2048 outcomes.
    let path = tmpfile("dist1591.csv");
    let out = run_cli(&[
        "factor",
        "1591",
        "--a",
        "2",
        "--seed",
        "1",
        "--shots",
        "1",
        "--emit-dist",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.code() == Some(0) || out.status.code() == Some(2),
        "unexpected exit {:?}",
        out.status.code()
    );
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2049);
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-6);
}
