//! Factoring driver: orchestrates circuit runs (or the injector test
//! double), collects the phase pool, converts phases to candidate orders,
//! and extracts divisors by gcd post-processing.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modexp::{build_shor_circuit, circuit_params};
use crate::oracle;
use crate::state::qubit_cap;

/// Greatest common divisor by Euclid's algorithm, with `gcd(0, y) = y`.
pub fn gcd(x: &BigUint, y: &BigUint) -> Result<BigUint> {
    if x.is_zero() && y.is_zero() {
        return Err(Error::GcdBothZero);
    }
    let (mut a, mut b) = (x.clone(), y.clone());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    Ok(a)
}

/// `base^exponent mod modulus` by square-and-multiply; exponents of any
/// size are fine since only residues are ever materialized.
pub fn modpow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return Err(Error::ZeroModulus);
    }
    Ok(base.modpow(exponent, modulus))
}

/// Nearest integer to `phase·n`, half rounding up. The phase is expanded
/// to its exact dyadic value, so the result is exact for any size of `n`.
pub fn phase_to_l(phase: f64, n: &BigUint) -> Result<BigUint> {
    if *n < BigUint::from(3u32) {
        return Err(Error::InvalidConfig(format!(
            "phase-to-order conversion needs n >= 3, got {n}"
        )));
    }
    if !phase.is_finite() || phase < 0.0 {
        return Err(Error::InvalidConfig(format!("bad phase {phase}")));
    }
    if phase == 0.0 {
        return Ok(BigUint::zero());
    }
    let bits = phase.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let raw_mant = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if raw_exp == 0 {
        (raw_mant, -1074i64)
    } else {
        (raw_mant | (1 << 52), raw_exp - 1075)
    };
    let product = BigUint::from(mant) * n;
    if exp >= 0 {
        Ok(product << exp as u64)
    } else {
        let shift = (-exp) as u64;
        // floor(product/2^shift + 1/2), computed without truncation.
        Ok(((product << 1) + (BigUint::one() << shift)) >> (shift + 1))
    }
}

fn gcd_with_modulus(v: &BigUint, n: &BigUint) -> Result<BigUint> {
    if v.is_zero() {
        // a^{l/2} ≡ ±1 collapses one factor to zero; gcd(0, n) = n.
        return Ok(n.clone());
    }
    gcd(v, n)
}

fn even_case(l_even: &BigUint, a: &BigUint, n: &BigUint) -> Result<BTreeSet<BigUint>> {
    let half = l_even >> 1;
    let residue = modpow(a, &half, n)?;
    let v1 = (&residue + 1u32) % n;
    let v2 = (&residue + n - 1u32) % n;
    let mut out = BTreeSet::new();
    out.insert(gcd_with_modulus(&v1, n)?);
    out.insert(gcd_with_modulus(&v2, n)?);
    Ok(out)
}

/// Divisors of `n` extracted from a candidate order `l`: for even `l`,
/// `gcd(a^{l/2} ± 1, n)`; for odd `l`, the union over the even neighbors
/// `l−1` and `l+1`. Giant intermediate values never appear because
/// `gcd(x, n) = gcd(x mod n, n)`.
pub fn postprocess(l: &BigUint, a: &BigUint, n: &BigUint) -> Result<BTreeSet<BigUint>> {
    if n.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if (l % 2u32).is_zero() {
        even_case(l, a, n)
    } else {
        let mut out = even_case(&(l - 1u32), a, n)?;
        out.extend(even_case(&(l + 1u32), a, n)?);
        Ok(out)
    }
}

/// Which sampler feeds the phase pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Build and simulate the circuit, then sample its final state.
    Simulator,
    /// Inject the oracle's ideal phase `ord(a, n)/n` instead of sampling.
    Injector,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Simulator => "sim",
            Backend::Injector => "injector",
        }
    }
}

/// When the sampling loop stops consuming further results.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopPolicy {
    /// Stop at the first sample contributing a nontrivial divisor.
    FirstNontrivial,
    /// Stop once this many distinct nontrivial divisors are aggregated.
    TargetCount(u64),
    /// Consume every sample of every run.
    Exhaust,
}

impl StopPolicy {
    pub fn as_str(&self) -> String {
        match self {
            StopPolicy::FirstNontrivial => "first".into(),
            StopPolicy::TargetCount(k) => format!("count:{k}"),
            StopPolicy::Exhaust => "exhaust".into(),
        }
    }
}

/// Full configuration of one `factor` invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: BigUint,
    /// Fixed base, or `None` to draw one per run from `[2, n-1]`.
    pub a: Option<BigUint>,
    pub shots: u64,
    pub runs: u32,
    pub seed: u64,
    pub policy: StopPolicy,
    pub backend: Backend,
    pub gcd_shortcut: bool,
    pub lower_bits: Option<usize>,
}

impl RunConfig {
    pub fn new(n: BigUint) -> Self {
        RunConfig {
            n,
            a: None,
            shots: 150,
            runs: 1,
            seed: 0,
            policy: StopPolicy::FirstNontrivial,
            backend: Backend::Simulator,
            gcd_shortcut: false,
            lower_bits: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < BigUint::from(3u32) {
            return Err(Error::InvalidConfig(format!(
                "n must be at least 3, got {}",
                self.n
            )));
        }
        if (&self.n % 2u32).is_zero() {
            return Err(Error::EvenModulus {
                n: self.n.to_u64().unwrap_or(u64::MAX),
            });
        }
        if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if let Some(a) = &self.a {
            if *a < BigUint::from(2u32) || *a > &self.n - 1u32 {
                return Err(Error::InvalidConfig(format!(
                    "base {a} outside [2, {}]",
                    &self.n - 1u32
                )));
            }
        }
        if self.lower_bits == Some(0) {
            return Err(Error::ZeroWidth);
        }
        Ok(())
    }
}

/// One measured sample: outcome `m` over modulus `q = 2^p`, so the phase
/// is exactly `m/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSample {
    pub run: u32,
    pub index: u64,
    pub a: BigUint,
    pub m: u64,
    pub q: u64,
}

impl PhaseSample {
    /// `m/q`, exact in floating point since `q` is a power of two.
    pub fn phase(&self) -> f64 {
        self.m as f64 / self.q as f64
    }
}

/// How one record entered the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordSource {
    Simulator,
    Injector,
    GcdShortcut,
}

/// Post-processing outcome for one sample (or one gcd shortcut hit).
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorRecord {
    pub run: u32,
    pub sample: u64,
    pub a: BigUint,
    pub source: RecordSource,
    pub phase: Option<f64>,
    /// `(m, q)` for simulator samples.
    pub measured: Option<(u64, u64)>,
    pub l: Option<BigUint>,
    /// Distinct divisors, ascending; every entry divides `n` exactly.
    pub divisors: Vec<BigUint>,
    /// `n/d` for each divisor, aligned with `divisors`.
    pub cofactors: Vec<BigUint>,
}

/// Aggregated output of a full driver invocation.
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub config: RunConfig,
    /// p, from `2^p > n + 1`.
    pub upper_bits: usize,
    /// n-register width when the base is fixed or overridden.
    pub lower_bits: Option<usize>,
    pub total_qubits: Option<usize>,
    pub records: Vec<DivisorRecord>,
    /// Union of every record's divisor set.
    pub divisors: BTreeSet<BigUint>,
    pub diagnostics: Vec<String>,
    pub runtime: Duration,
}

impl FactorizationReport {
    pub fn nontrivial_divisors(&self) -> BTreeSet<BigUint> {
        self.divisors
            .iter()
            .filter(|d| !d.is_one() && **d != self.config.n)
            .cloned()
            .collect()
    }
}

fn bits_of(x: &BigUint) -> usize {
    x.bits() as usize
}

/// Register widths implied by the configuration: p always, the lower
/// width and total only when the base is pinned down.
fn layout(config: &RunConfig) -> (usize, Option<usize>, Option<usize>) {
    let p = bits_of(&(&config.n + 1u32));
    let lower = config.lower_bits.or_else(|| config.a.as_ref().map(bits_of));
    (p, lower, lower.map(|n| p + n))
}

struct RunShard {
    records: Vec<DivisorRecord>,
    diagnostics: Vec<String>,
}

fn make_record(
    run: u32,
    sample: u64,
    a: &BigUint,
    source: RecordSource,
    phase: Option<f64>,
    measured: Option<(u64, u64)>,
    l: Option<BigUint>,
    divisors: BTreeSet<BigUint>,
    n: &BigUint,
) -> DivisorRecord {
    let divisors: Vec<BigUint> = divisors.into_iter().collect();
    let cofactors = divisors.iter().map(|d| n / d).collect();
    DivisorRecord {
        run,
        sample,
        a: a.clone(),
        source,
        phase,
        measured,
        l,
        divisors,
        cofactors,
    }
}

fn execute_run(config: &RunConfig, run: u32) -> Result<RunShard> {
    let n = &config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(run as u64));
    let a = match &config.a {
        Some(a) => a.clone(),
        None => rng.gen_biguint_range(&BigUint::from(2u32), n),
    };
    let sample_seed: u64 = rng.gen();
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();

    if config.gcd_shortcut {
        let g = gcd(&a, n)?;
        if !g.is_one() {
            let mut found = BTreeSet::new();
            found.insert(g.clone());
            found.insert(n / &g);
            records.push(make_record(
                run,
                0,
                &a,
                RecordSource::GcdShortcut,
                None,
                None,
                None,
                found,
                n,
            ));
            return Ok(RunShard {
                records,
                diagnostics,
            });
        }
    }

    match config.backend {
        Backend::Simulator => {
            let n64 = n.to_u64().ok_or_else(|| sim_cap_error(config))?;
            let a64 = a.to_u64().expect("a < n fits u64 when n does");
            let spec = circuit_params(n64, a64, config.lower_bits)?;
            if spec.width() > qubit_cap() {
                return Err(Error::QubitCapExceeded {
                    required: spec.width(),
                    cap: qubit_cap(),
                    amplitudes: 1u128 << spec.width().min(127),
                });
            }
            let (circuit, map) = build_shor_circuit(&spec)?;
            let state = circuit.execute()?;
            let outcomes = state.sample_outcomes(map.upper, config.shots, sample_seed)?;
            for (index, m) in outcomes.into_iter().enumerate() {
                let chi = PhaseSample {
                    run,
                    index: index as u64,
                    a: a.clone(),
                    m,
                    q: spec.q(),
                };
                let phase = chi.phase();
                let l = phase_to_l(phase, n)?;
                let divisors = postprocess(&l, &a, n)?;
                records.push(make_record(
                    run,
                    chi.index,
                    &a,
                    RecordSource::Simulator,
                    Some(phase),
                    Some((chi.m, chi.q)),
                    Some(l),
                    divisors,
                    n,
                ));
            }
        }
        Backend::Injector => match oracle::ideal_phases(&a, n) {
            Ok(phases) => {
                for (index, phase) in phases.into_iter().enumerate() {
                    let l = phase_to_l(phase, n)?;
                    let divisors = postprocess(&l, &a, n)?;
                    records.push(make_record(
                        run,
                        index as u64,
                        &a,
                        RecordSource::Injector,
                        Some(phase),
                        None,
                        Some(l),
                        divisors,
                        n,
                    ));
                }
            }
            Err(Error::NotCoprime { g, .. }) => {
                diagnostics.push(format!(
                    "run {run}: a = {a} shares factor {g} with n; injector needs a coprime base \
                     (enable the gcd shortcut to harvest it)"
                ));
            }
            Err(e) => return Err(e),
        },
    }
    Ok(RunShard {
        records,
        diagnostics,
    })
}

fn sim_cap_error(config: &RunConfig) -> Error {
    let (p, lower, _) = layout(config);
    let required = p + lower.unwrap_or_else(|| bits_of(&(&config.n - 1u32)));
    Error::QubitCapExceeded {
        required,
        cap: qubit_cap(),
        amplitudes: 1u128 << required.min(127),
    }
}

/// Run the full sampling-and-post-processing loop.
///
/// Every run `r` derives its RNG from `seed + r`, so runs are independent
/// and the report is identical whether they execute serially or on the
/// rayon pool. The stopping policy is applied to the records in
/// `(run, sample)` order afterwards, truncating everything past the stop
/// point; speculative work beyond it never changes the report.
pub fn run(config: &RunConfig) -> Result<FactorizationReport> {
    let started = Instant::now();
    config.validate()?;
    let mut diagnostics = Vec::new();

    if let Some(n64) = config.n.to_u64() {
        // Desk-scale primality diagnostic; larger moduli skip the check.
        if n64 <= 1_000_000_000_000 && oracle::trial_factor(n64)?.is_prime() {
            diagnostics.push(format!(
                "{n64} is prime; only trivial divisors can be found"
            ));
        }
    }

    if config.backend == Backend::Simulator {
        // Worst-case width check up front so the error names the
        // required qubit count before any allocation.
        let (p, lower, _) = layout(config);
        let worst = p + lower.unwrap_or_else(|| bits_of(&(&config.n - 1u32)));
        if config.n.to_u64().is_none() || worst > qubit_cap() {
            return Err(Error::QubitCapExceeded {
                required: worst,
                cap: qubit_cap(),
                amplitudes: 1u128 << worst.min(127),
            });
        }
    }

    let run_indices: Vec<u32> = (1..=config.runs).collect();
    let shards: Vec<Result<RunShard>> = if config.runs > 1 {
        run_indices
            .par_iter()
            .map(|&r| execute_run(config, r))
            .collect()
    } else {
        run_indices
            .iter()
            .map(|&r| execute_run(config, r))
            .collect()
    };

    let mut records = Vec::new();
    let mut divisors = BTreeSet::new();
    let mut nontrivial = BTreeSet::new();
    let one = BigUint::one();
    'collect: for shard in shards {
        let shard = shard?;
        diagnostics.extend(shard.diagnostics);
        for record in shard.records {
            for d in &record.divisors {
                divisors.insert(d.clone());
                if *d != one && *d != config.n {
                    nontrivial.insert(d.clone());
                }
            }
            records.push(record);
            let stop = match config.policy {
                StopPolicy::FirstNontrivial => !nontrivial.is_empty(),
                StopPolicy::TargetCount(k) => nontrivial.len() as u64 >= k,
                StopPolicy::Exhaust => false,
            };
            if stop {
                break 'collect;
            }
        }
    }

    let (upper_bits, lower_bits, total_qubits) = layout(config);
    Ok(FactorizationReport {
        config: config.clone(),
        upper_bits,
        lower_bits,
        total_qubits,
        records,
        divisors,
        diagnostics,
        runtime: started.elapsed(),
    })
}
