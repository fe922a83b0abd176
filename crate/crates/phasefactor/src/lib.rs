//! Integer factoring toolkit built on phase-ladder quantum circuits.
//!
//! The pipeline: build a circuit whose upper register enumerates
//! exponents and whose lower register accumulates a fixed-point phase
//! proportional to them, simulate it on a dense statevector, sample the
//! upper register, convert each sampled phase `χ` to a candidate order
//! `l = round(χ·n)`, and extract divisors as `gcd(a^{l/2} ± 1, n)`.
//! Classical oracles (multiplicative order, trial division, a closed-form
//! distribution) provide independent ground truth for every step.

pub mod circuit;
pub mod driver;
pub mod error;
pub mod modexp;
pub mod oracle;
pub mod report;
pub mod state;

pub use circuit::{iqft, qft, Circuit, Gate};
pub use driver::{run, Backend, FactorizationReport, RunConfig, StopPolicy};
pub use error::{Error, Result};
pub use modexp::{build_shor_circuit, circuit_params, CircuitSpec};
pub use state::{Distribution, StateVector};
