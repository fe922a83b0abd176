//! Dense statevector simulation: gate kernels, exact probabilities, and
//! seeded measurement sampling.
//!
//! Bit-order convention, used everywhere in this crate: qubit `i` carries
//! weight `2^i` in basis-state indices and measured outcomes (little-endian).
//! A register `[s, e)` therefore reads out as `Σ bit(s+k) · 2^k`.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Hard default for the number of qubits a dense state may hold.
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Environment variable overriding [`DEFAULT_QUBIT_CAP`].
pub const QUBIT_CAP_ENV: &str = "PHASEFACTOR_QUBIT_CAP";

/// Amplitude count above which gate kernels fan out to the rayon pool.
/// Parallel and sequential paths evaluate the identical expression per
/// amplitude, so results are bit-identical regardless of thread count.
const PARALLEL_THRESHOLD: usize = 1 << 16;

/// Effective qubit cap: `PHASEFACTOR_QUBIT_CAP` if set and parseable,
/// otherwise [`DEFAULT_QUBIT_CAP`]. Read once per process.
pub fn qubit_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(QUBIT_CAP_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_QUBIT_CAP)
    })
}

// Raw-pointer wrapper so rayon can write disjoint amplitudes in place.
// Each parallel task derives its indices from its task id alone, and no
// two task ids map to the same index.
#[derive(Clone, Copy)]
struct SendPtr(*mut Complex64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

impl SendPtr {
    #[inline]
    fn get(self) -> *mut Complex64 {
        self.0
    }
}

/// Spread `x` so that bit position `k` becomes a zero bit.
#[inline]
fn insert_zero(x: usize, k: usize) -> usize {
    ((x >> k) << (k + 1)) | (x & ((1 << k) - 1))
}

/// A pure quantum state over `num_qubits` qubits as `2^num_qubits`
/// complex amplitudes with unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Allocate `|0…0⟩` over `num_qubits` qubits, enforcing the qubit cap.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_cap(num_qubits, qubit_cap())
    }

    /// Same as [`StateVector::new`] with an explicit cap.
    pub fn with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::ZeroWidth);
        }
        if num_qubits > cap {
            return Err(Error::QubitCapExceeded {
                required: num_qubits,
                cap,
                amplitudes: 1u128 << num_qubits.min(127),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Adopt an explicit amplitude vector, which must have power-of-two
    /// length and unit norm within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let num_qubits = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || amps.len() != 1 << num_qubits {
            return Err(Error::InvalidConfig(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "amplitudes have norm² {norm}, expected 1"
            )));
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Σ|amplitude|², which is 1 for any valid state.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Reset to the computational basis state `index`.
    pub fn prepare_basis(&mut self, index: u64) -> Result<()> {
        if index >= (1u64 << self.num_qubits) {
            return Err(Error::BadRegister {
                start: 0,
                end: self.num_qubits,
                width: self.num_qubits,
            });
        }
        self.amps.fill(Complex64::new(0.0, 0.0));
        self.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                width: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Hadamard on `qubit`.
    pub fn apply_h(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ptr = SendPtr(self.amps.as_mut_ptr());
        let pairs = self.amps.len() / 2;
        let kernel = move |t: usize| {
            let i = insert_zero(t, qubit);
            let j = i | (1 << qubit);
            // SAFETY: distinct t map to distinct (i, j) pairs.
            unsafe {
                let a = *ptr.get().add(i);
                let b = *ptr.get().add(j);
                *ptr.get().add(i) = (a + b) * s;
                *ptr.get().add(j) = (a - b) * s;
            }
        };
        if self.amps.len() >= PARALLEL_THRESHOLD {
            (0..pairs).into_par_iter().for_each(kernel);
        } else {
            (0..pairs).for_each(kernel);
        }
        Ok(())
    }

    /// Pauli-X on `qubit`.
    pub fn apply_x(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let ptr = SendPtr(self.amps.as_mut_ptr());
        let pairs = self.amps.len() / 2;
        let kernel = move |t: usize| {
            let i = insert_zero(t, qubit);
            let j = i | (1 << qubit);
            // SAFETY: distinct t map to distinct (i, j) pairs.
            unsafe {
                std::ptr::swap(ptr.get().add(i), ptr.get().add(j));
            }
        };
        if self.amps.len() >= PARALLEL_THRESHOLD {
            (0..pairs).into_par_iter().for_each(kernel);
        } else {
            (0..pairs).for_each(kernel);
        }
        Ok(())
    }

    /// Phase gate: multiplies the `|1⟩` component of `qubit` by `e^{iα}`.
    pub fn apply_phase(&mut self, qubit: usize, alpha: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let w = Complex64::from_polar(1.0, alpha);
        let ptr = SendPtr(self.amps.as_mut_ptr());
        let half = self.amps.len() / 2;
        let kernel = move |t: usize| {
            let i = insert_zero(t, qubit) | (1 << qubit);
            // SAFETY: distinct t map to distinct i.
            unsafe {
                *ptr.get().add(i) *= w;
            }
        };
        if self.amps.len() >= PARALLEL_THRESHOLD {
            (0..half).into_par_iter().for_each(kernel);
        } else {
            (0..half).for_each(kernel);
        }
        Ok(())
    }

    /// Controlled phase: multiplies amplitudes with both `control` and
    /// `target` bits set by `e^{iα}`; every other amplitude is untouched.
    pub fn apply_cphase(&mut self, control: usize, target: usize, alpha: f64) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::DuplicateQubit { qubit: control });
        }
        let (lo, hi) = (control.min(target), control.max(target));
        let w = Complex64::from_polar(1.0, alpha);
        let ptr = SendPtr(self.amps.as_mut_ptr());
        let quarter = self.amps.len() / 4;
        let kernel = move |t: usize| {
            let i = insert_zero(insert_zero(t, lo) | (1 << lo), hi) | (1 << hi);
            // SAFETY: distinct t map to distinct i.
            unsafe {
                *ptr.get().add(i) *= w;
            }
        };
        if self.amps.len() >= PARALLEL_THRESHOLD {
            (0..quarter).into_par_iter().for_each(kernel);
        } else {
            (0..quarter).for_each(kernel);
        }
        Ok(())
    }

    /// Swap two qubits.
    pub fn apply_swap(&mut self, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::DuplicateQubit { qubit: q1 });
        }
        let (lo, hi) = (q1.min(q2), q1.max(q2));
        let ptr = SendPtr(self.amps.as_mut_ptr());
        let quarter = self.amps.len() / 4;
        let kernel = move |t: usize| {
            let base = insert_zero(insert_zero(t, lo), hi);
            let i = base | (1 << lo);
            let j = base | (1 << hi);
            // SAFETY: distinct t map to distinct (i, j) pairs.
            unsafe {
                std::ptr::swap(ptr.get().add(i), ptr.get().add(j));
            }
        };
        if self.amps.len() >= PARALLEL_THRESHOLD {
            (0..quarter).into_par_iter().for_each(kernel);
        } else {
            (0..quarter).for_each(kernel);
        }
        Ok(())
    }

    fn check_register(&self, register: &Range<usize>) -> Result<()> {
        if register.is_empty() || register.end > self.num_qubits {
            return Err(Error::BadRegister {
                start: register.start,
                end: register.end,
                width: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Marginal outcome distribution of a contiguous register, summing
    /// `|amplitude|²` over the traced-out qubits. Accumulation is
    /// sequential in index order, so results are deterministic.
    pub fn exact_probabilities(&self, register: Range<usize>) -> Result<Distribution> {
        self.check_register(&register)?;
        let width = register.end - register.start;
        let mask = (1u64 << width) - 1;
        let shift = register.start;
        let mut probs = vec![0.0f64; 1 << width];
        for (idx, amp) in self.amps.iter().enumerate() {
            let outcome = ((idx as u64) >> shift) & mask;
            probs[outcome as usize] += amp.norm_sqr();
        }
        Ok(Distribution { width, probs })
    }

    /// Draw `shots` outcomes from the register's exact distribution, in
    /// draw order. Fixed `seed` gives an identical sequence every time.
    pub fn sample_outcomes(
        &self,
        register: Range<usize>,
        shots: u64,
        seed: u64,
    ) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let dist = self.exact_probabilities(register)?;
        let mut cumulative = Vec::with_capacity(dist.probs.len());
        let mut acc = 0.0f64;
        for p in &dist.probs {
            acc += p;
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outcomes = Vec::with_capacity(shots as usize);
        for _ in 0..shots {
            let u: f64 = rng.gen();
            let idx = cumulative.partition_point(|&c| c <= u);
            outcomes.push(idx.min(cumulative.len() - 1) as u64);
        }
        Ok(outcomes)
    }

    /// Multinomial counts over `shots` draws; counts sum to `shots`.
    pub fn sample_counts(
        &self,
        register: Range<usize>,
        shots: u64,
        seed: u64,
    ) -> Result<BTreeMap<u64, u64>> {
        let mut counts = BTreeMap::new();
        for outcome in self.sample_outcomes(register, shots, seed)? {
            *counts.entry(outcome).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Probabilities over the `2^width` outcomes of a measured register.
#[derive(Clone, Debug)]
pub struct Distribution {
    width: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn from_probs(width: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), 1 << width);
        Distribution { width, probs }
    }

    pub fn register_width(&self) -> usize {
        self.width
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.probs.get(outcome as usize).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(m, &p)| (m as u64, p))
    }

    /// Total-variation distance to another distribution over the same register.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        assert_eq!(self.width, other.width);
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0
    }
}


/// Random unit-norm state, for round-trip tests.
#[cfg(test)]
pub(crate) fn random_state(num_qubits: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = StateVector::new(num_qubits).unwrap();
    for a in s.amps.iter_mut() {
        *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = s.norm_sqr().sqrt();
    for a in s.amps.iter_mut() {
        *a /= norm;
    }
    s
}
