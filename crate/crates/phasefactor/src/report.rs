//! Machine-readable output: the versioned JSON report document and the
//! CSV row/distribution formats.
//!
//! Serialization is fully deterministic for a fixed seed: field order is
//! fixed, collections are sorted, and no volatile data (timings, paths)
//! enters the document. Phases and probabilities print in Rust's shortest
//! lossless decimal form, so parsing a document back reproduces the exact
//! doubles.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::driver::{FactorizationReport, RecordSource};
use crate::error::Result;
use crate::state::Distribution;

pub const SCHEMA_VERSION: u32 = 1;

/// Echo of the driver configuration plus the derived register layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: String,
    /// `fixed:<a>` or `random`.
    pub a_policy: String,
    pub shots: u64,
    pub runs: u32,
    pub seed: u64,
    pub policy: String,
    pub backend: String,
    pub gcd_shortcut: bool,
    pub lower_bits_override: Option<usize>,
    pub upper_bits: usize,
    pub lower_bits: Option<usize>,
    pub total_qubits: Option<usize>,
}

/// One post-processed sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub run: u32,
    pub sample: u64,
    pub a: String,
    pub source: String,
    /// Measured outcome and its modulus; the exact rational phase is m/q.
    pub m: Option<u64>,
    pub q: Option<u64>,
    pub phase: Option<String>,
    pub l: Option<String>,
    pub divisors: Vec<String>,
    pub cofactors: Vec<String>,
}

/// The versioned JSON document written by `factor --report`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub rows: Vec<ReportRow>,
    /// Aggregated divisor set, ascending; includes trivial divisors.
    pub divisors: Vec<String>,
    pub nontrivial_divisors: Vec<String>,
    pub diagnostics: Vec<String>,
}

fn source_str(source: RecordSource) -> &'static str {
    match source {
        RecordSource::Simulator => "sim",
        RecordSource::Injector => "injector",
        RecordSource::GcdShortcut => "gcd-shortcut",
    }
}

impl ReportDocument {
    pub fn from_report(report: &FactorizationReport) -> Self {
        let config = &report.config;
        let echo = ConfigEcho {
            n: config.n.to_string(),
            a_policy: match &config.a {
                Some(a) => format!("fixed:{a}"),
                None => "random".into(),
            },
            shots: config.shots,
            runs: config.runs,
            seed: config.seed,
            policy: config.policy.as_str(),
            backend: config.backend.as_str().into(),
            gcd_shortcut: config.gcd_shortcut,
            lower_bits_override: config.lower_bits,
            upper_bits: report.upper_bits,
            lower_bits: report.lower_bits,
            total_qubits: report.total_qubits,
        };
        let rows = report
            .records
            .iter()
            .map(|r| ReportRow {
                run: r.run,
                sample: r.sample,
                a: r.a.to_string(),
                source: source_str(r.source).into(),
                m: r.measured.map(|(m, _)| m),
                q: r.measured.map(|(_, q)| q),
                phase: r.phase.map(|p| p.to_string()),
                l: r.l.as_ref().map(|l| l.to_string()),
                divisors: r.divisors.iter().map(|d| d.to_string()).collect(),
                cofactors: r.cofactors.iter().map(|c| c.to_string()).collect(),
            })
            .collect();
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            config: echo,
            rows,
            divisors: report.divisors.iter().map(|d| d.to_string()).collect(),
            nontrivial_divisors: report
                .nontrivial_divisors()
                .iter()
                .map(|d| d.to_string())
                .collect(),
            diagnostics: report.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-sample CSV: `run,a,phase,l,d1,d2,n_over_d1,n_over_d2`.
    pub fn rows_csv(&self) -> String {
        let n: BigUint = self.config.n.parse().expect("document n is decimal");
        let mut out = String::from("run,a,phase,l,d1,d2,n_over_d1,n_over_d2\n");
        for row in &self.rows {
            let (d1, d2) = headline_divisors(row, &n);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.run,
                row.a,
                row.phase.as_deref().unwrap_or(""),
                row.l.as_deref().unwrap_or(""),
                d1,
                d2,
                &n / &d1.parse::<BigUint>().expect("divisor is decimal"),
                &n / &d2.parse::<BigUint>().expect("divisor is decimal"),
            );
        }
        out
    }
}

/// Pick the two headline divisors of a row: nontrivial ones first in
/// ascending order, then 1, then n itself, padding with 1.
pub fn headline_divisors(row: &ReportRow, n: &BigUint) -> (String, String) {
    let parsed: Vec<BigUint> = row
        .divisors
        .iter()
        .map(|d| d.parse().expect("divisor is decimal"))
        .collect();
    let mut ordered: Vec<&BigUint> = parsed.iter().filter(|d| !d.is_one() && *d != n).collect();
    if parsed.iter().any(|d| d.is_one()) {
        ordered.push(&parsed[0]); // divisors are ascending, so [0] is 1
    }
    if let Some(last) = parsed.last() {
        if last == n {
            ordered.push(last);
        }
    }
    let d1 = ordered
        .first()
        .map(|d| d.to_string())
        .unwrap_or_else(|| "1".into());
    let d2 = ordered
        .get(1)
        .map(|d| d.to_string())
        .unwrap_or_else(|| "1".into());
    (d1, d2)
}

/// Distribution CSV: `m,phase,probability`, rows sorted by outcome.
pub fn distribution_csv(dist: &Distribution) -> String {
    let q = 1u64 << dist.register_width();
    let mut out = String::from("m,phase,probability\n");
    for (m, p) in dist.iter() {
        let _ = writeln!(out, "{},{},{}", m, m as f64 / q as f64, p);
    }
    out
}
