//! Phase-ladder modular exponentiation circuits.
//!
//! The upper register holds the exponent `l`; the lower register, kept in
//! the Fourier basis across all blocks, accumulates the n-bit fixed-point
//! quantization of `l·φ_a mod 2π`, where `φ_a = 2π·a/N`. Block `j` is
//! controlled by upper qubit `j` (weight `2^j`) and adds the quantized
//! phase constant `b_j` derived from `2^j mod N`, so a control value `l`
//! accumulates `l·φ_a` in total. One inverse Fourier transform at the end
//! of the ladder returns the lower register to the computational basis;
//! hoisting it out of the per-block structure cancels the interior
//! QFT·IQFT pairs and is unitarily identical.

use std::f64::consts::TAU;
use std::ops::Range;

use crate::circuit::{self, Circuit, Gate};
use crate::error::{Error, Result};

/// Register layout for one `(N, a)` instance.
///
/// `upper_bits` is minimal with `2^p > N + 1`; `lower_bits` is minimal
/// with `2^n > a` unless overridden.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitSpec {
    modulus: u64,
    base: u64,
    upper_bits: usize,
    lower_bits: usize,
}

impl CircuitSpec {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// p: width of the exponent register.
    pub fn upper_bits(&self) -> usize {
        self.upper_bits
    }

    /// n: width of the phase-accumulator register.
    pub fn lower_bits(&self) -> usize {
        self.lower_bits
    }

    /// q = 2^p, the modulus of measured outcomes.
    pub fn q(&self) -> u64 {
        1u64 << self.upper_bits
    }

    pub fn width(&self) -> usize {
        self.upper_bits + self.lower_bits
    }

    /// Upper (exponent) register: qubits `[0, p)`.
    pub fn upper_register(&self) -> Range<usize> {
        0..self.upper_bits
    }

    /// Lower (accumulator) register: qubits `[p, p+n)`.
    pub fn lower_register(&self) -> Range<usize> {
        self.upper_bits..self.upper_bits + self.lower_bits
    }
}

/// Smallest `k` with `2^k > x`.
fn bits_above(x: u64) -> usize {
    (64 - x.leading_zeros()) as usize
}

/// Derive the register layout for factoring `modulus` with base `base`.
/// `lower_override` replaces the minimal lower width when given.
pub fn circuit_params(
    modulus: u64,
    base: u64,
    lower_override: Option<usize>,
) -> Result<CircuitSpec> {
    if modulus < 3 {
        return Err(Error::ModulusTooSmall { n: modulus });
    }
    if modulus % 2 == 0 {
        return Err(Error::EvenModulus { n: modulus });
    }
    if base < 2 || base > modulus - 1 {
        return Err(Error::BaseOutOfRange {
            a: base,
            max: modulus - 1,
        });
    }
    let lower_bits = match lower_override {
        Some(0) => return Err(Error::ZeroWidth),
        Some(n) => n,
        None => bits_above(base),
    };
    Ok(CircuitSpec {
        modulus,
        base,
        upper_bits: bits_above(modulus + 1),
        lower_bits,
    })
}

/// `2π·a/N` reduced to `[0, 2π)`.
pub fn phase_of(a: u64, modulus: u64) -> Result<f64> {
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(TAU * (a % modulus) as f64 / modulus as f64)
}

/// `2^j mod N` by exact modular doubling.
pub fn block_coefficient(block: usize, modulus: u64) -> u64 {
    assert!(modulus > 0, "modulus must be nonzero");
    let m = modulus as u128;
    let mut c = 1u128 % m;
    for _ in 0..block {
        c = (c * 2) % m;
    }
    c as u64
}

/// Quantize an angle to `n` fixed-point bits of a turn:
/// `round(φ/(2π) · 2^n) mod 2^n`, rounding half up.
pub fn quantize_phase(phi: f64, lower_bits: usize) -> u64 {
    assert!(lower_bits >= 1 && lower_bits < 64);
    let canonical = circuit::canonical_angle(phi);
    let scaled = canonical / TAU * (1u64 << lower_bits) as f64;
    (scaled.round() as u64) % (1u64 << lower_bits)
}

/// The constants driving block `j` of the ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseConstant {
    /// Block index; the block is controlled by upper qubit `j`.
    pub block: usize,
    /// `c_j = 2^j mod N`.
    pub coefficient: u64,
    /// `φ_j = c_j·φ_a mod 2π`, computed from the exactly reduced
    /// residue `c_j·a mod N` so no rounding accumulates across blocks.
    pub angle: f64,
    /// `b_j = round(φ_j/(2π) · 2^n) mod 2^n`.
    pub quantized: u64,
}

/// Per-block constants for all `p` blocks of `spec`.
pub fn phase_constants(spec: &CircuitSpec) -> Vec<PhaseConstant> {
    let m = spec.modulus as u128;
    let a = spec.base as u128;
    let mut constants = Vec::with_capacity(spec.upper_bits);
    let mut coefficient = 1u128 % m;
    for block in 0..spec.upper_bits {
        let residue = (coefficient * a % m) as u64;
        let angle = TAU * residue as f64 / spec.modulus as f64;
        constants.push(PhaseConstant {
            block,
            coefficient: coefficient as u64,
            angle,
            quantized: quantize_phase(angle, spec.lower_bits),
        });
        coefficient = coefficient * 2 % m;
    }
    constants
}

/// Fourier-basis adder for block `j`: adds `b_j` into the lower register,
/// controlled on upper qubit `j`. Lower qubit `t` (weight `2^t`) gets one
/// controlled phase of `2π·b_j/2^{n−t}`.
pub fn build_controlled_block(block: usize, spec: &CircuitSpec) -> Result<Circuit> {
    if block >= spec.upper_bits {
        return Err(Error::BlockOutOfRange {
            block,
            upper_bits: spec.upper_bits,
        });
    }
    let constants = phase_constants(spec);
    controlled_adder(block, constants[block].quantized, spec)
}

fn controlled_adder(control: usize, addend: u64, spec: &CircuitSpec) -> Result<Circuit> {
    let mut c = Circuit::new(spec.width())?;
    let n = spec.lower_bits;
    for t in 0..n {
        let denom = 1u64 << (n - t);
        // 2π·b/2^{n−t} mod 2π, as an exact dyadic fraction of a turn.
        let alpha = TAU * (addend % denom) as f64 / denom as f64;
        c.push(Gate::cphase(control, spec.upper_bits + t, alpha))?;
    }
    Ok(c)
}

/// The ladder between basis prep and readout: Fourier transform on the
/// lower register, all `p` controlled blocks, one inverse transform.
/// With the upper register in basis state `|l⟩`, the lower register ends
/// in `|Σ_{j∈bits(l)} b_j mod 2^n⟩` with certainty.
pub fn build_ladder(spec: &CircuitSpec) -> Result<Circuit> {
    let mut c = Circuit::new(spec.width())?;
    c.extend_shifted(&circuit::qft(spec.lower_bits)?, spec.upper_bits)?;
    for block in 0..spec.upper_bits {
        c.extend(&build_controlled_block(block, spec)?)?;
    }
    c.extend_shifted(&circuit::iqft(spec.lower_bits)?, spec.upper_bits)?;
    Ok(c)
}

/// Register map returned alongside the full circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterMap {
    pub upper: Range<usize>,
    pub lower: Range<usize>,
}

/// The full factoring circuit: Hadamards on the upper register, the
/// phase ladder on the lower register, and a final inverse Fourier
/// transform on the upper register. Width is `p + n`.
pub fn build_shor_circuit(spec: &CircuitSpec) -> Result<(Circuit, RegisterMap)> {
    let mut c = Circuit::new(spec.width())?;
    for q in spec.upper_register() {
        c.push(Gate::h(q))?;
    }
    c.extend(&build_ladder(spec)?)?;
    c.extend(&circuit::iqft(spec.upper_bits)?)?;
    Ok((
        c,
        RegisterMap {
            upper: spec.upper_register(),
            lower: spec.lower_register(),
        },
    ))
}
