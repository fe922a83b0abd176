//! Gate-list circuit representation: construction, inversion, execution
//! against the statevector backend, stats, and a line-based text format.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Reduce an angle to the canonical range `[0, 2π)`.
pub fn canonical_angle(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if a >= TAU {
        a - TAU
    } else {
        a
    }
}

/// One gate over qubit indices, with angles canonical in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H {
        qubit: usize,
    },
    X {
        qubit: usize,
    },
    Phase {
        qubit: usize,
        alpha: f64,
    },
    CPhase {
        control: usize,
        target: usize,
        alpha: f64,
    },
    Swap {
        q1: usize,
        q2: usize,
    },
}

impl Gate {
    pub fn h(qubit: usize) -> Self {
        Gate::H { qubit }
    }

    pub fn x(qubit: usize) -> Self {
        Gate::X { qubit }
    }

    pub fn phase(qubit: usize, alpha: f64) -> Self {
        Gate::Phase {
            qubit,
            alpha: canonical_angle(alpha),
        }
    }

    pub fn cphase(control: usize, target: usize, alpha: f64) -> Self {
        Gate::CPhase {
            control,
            target,
            alpha: canonical_angle(alpha),
        }
    }

    pub fn swap(q1: usize, q2: usize) -> Self {
        Gate::Swap { q1, q2 }
    }

    /// Qubits the gate touches (one or two).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H { qubit } | Gate::X { qubit } | Gate::Phase { qubit, .. } => vec![*qubit],
            Gate::CPhase {
                control, target, ..
            } => vec![*control, *target],
            Gate::Swap { q1, q2 } => vec![*q1, *q2],
        }
    }

    /// The inverse gate: phases negate their angle, the rest are self-inverse.
    pub fn inverse(&self) -> Self {
        match self {
            Gate::H { .. } | Gate::X { .. } | Gate::Swap { .. } => self.clone(),
            Gate::Phase { qubit, alpha } => Gate::phase(*qubit, -alpha),
            Gate::CPhase {
                control,
                target,
                alpha,
            } => Gate::cphase(*control, *target, -alpha),
        }
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        match self {
            Gate::H { qubit } => state.apply_h(*qubit),
            Gate::X { qubit } => state.apply_x(*qubit),
            Gate::Phase { qubit, alpha } => state.apply_phase(*qubit, *alpha),
            Gate::CPhase {
                control,
                target,
                alpha,
            } => state.apply_cphase(*control, *target, *alpha),
            Gate::Swap { q1, q2 } => state.apply_swap(*q1, *q2),
        }
    }
}

/// Width, gate count, and depth of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitStats {
    pub width: usize,
    pub gate_count: usize,
    pub depth: usize,
}

/// An ordered gate list over `width` qubits. Immutable once built up;
/// freely shareable across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        Ok(Circuit {
            width,
            gates: Vec::new(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Append a gate, validating its indices against the circuit width.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qs = gate.qubits();
        for &q in &qs {
            if q >= self.width {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::DuplicateQubit { qubit: qs[0] });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Append every gate of `other`, which must not be wider than `self`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.width > self.width {
            return Err(Error::WidthMismatch {
                circuit: other.width,
                state: self.width,
            });
        }
        for g in &other.gates {
            self.gates.push(g.clone());
        }
        Ok(())
    }

    /// Append `other` with all qubit indices shifted up by `offset`.
    pub fn extend_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        for g in &other.gates {
            let shifted = match g {
                Gate::H { qubit } => Gate::H {
                    qubit: qubit + offset,
                },
                Gate::X { qubit } => Gate::X {
                    qubit: qubit + offset,
                },
                Gate::Phase { qubit, alpha } => Gate::Phase {
                    qubit: qubit + offset,
                    alpha: *alpha,
                },
                Gate::CPhase {
                    control,
                    target,
                    alpha,
                } => Gate::CPhase {
                    control: control + offset,
                    target: target + offset,
                    alpha: *alpha,
                },
                Gate::Swap { q1, q2 } => Gate::Swap {
                    q1: q1 + offset,
                    q2: q2 + offset,
                },
            };
            self.push(shifted)?;
        }
        Ok(())
    }

    /// Gates reversed, each replaced by its inverse.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Apply all gates in order to `state`.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.num_qubits() != self.width {
            return Err(Error::WidthMismatch {
                circuit: self.width,
                state: state.num_qubits(),
            });
        }
        for g in &self.gates {
            g.apply(state)?;
        }
        Ok(())
    }

    /// Run the circuit on a fresh `|0…0⟩` state of matching width.
    pub fn execute(&self) -> Result<StateVector> {
        let mut state = StateVector::new(self.width)?;
        self.apply_to(&mut state)?;
        Ok(state)
    }

    /// Reconstruct the circuit's unitary by executing it on every basis
    /// state; row-major, so `[r][k]` is `⟨r|U|k⟩`. Exponential in width,
    /// meant for verification at small sizes.
    pub fn unitary_matrix(&self) -> Result<Vec<Vec<num_complex::Complex64>>> {
        let dim = 1usize << self.width;
        let mut columns = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut s = StateVector::new(self.width)?;
            s.prepare_basis(k as u64)?;
            self.apply_to(&mut s)?;
            columns.push(s.amplitudes().to_vec());
        }
        Ok((0..dim)
            .map(|r| (0..dim).map(|k| columns[k][r]).collect())
            .collect())
    }

    /// Exact counts; depth is the longest chain under qubit-sharing order.
    pub fn stats(&self) -> CircuitStats {
        let mut per_qubit = vec![0usize; self.width];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let d = 1 + qs.iter().map(|&q| per_qubit[q]).max().unwrap_or(0);
            for &q in &qs {
                per_qubit[q] = d;
            }
            depth = depth.max(d);
        }
        CircuitStats {
            width: self.width,
            gate_count: self.gates.len(),
            depth,
        }
    }

    /// Line-based listing: a `qubits <width>` header, then one gate per
    /// line. Angles print with Rust's shortest lossless decimal form, so
    /// [`Circuit::parse_text`] reconstructs the exact circuit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", self.width);
        for g in &self.gates {
            match g {
                Gate::H { qubit } => {
                    let _ = writeln!(out, "H q[{qubit}]");
                }
                Gate::X { qubit } => {
                    let _ = writeln!(out, "X q[{qubit}]");
                }
                Gate::Phase { qubit, alpha } => {
                    let _ = writeln!(out, "PHASE q[{qubit}] alpha={alpha}");
                }
                Gate::CPhase {
                    control,
                    target,
                    alpha,
                } => {
                    let _ = writeln!(out, "CPHASE q[{control}] q[{target}] alpha={alpha}");
                }
                Gate::Swap { q1, q2 } => {
                    let _ = writeln!(out, "SWAP q[{q1}] q[{q2}]");
                }
            }
        }
        out
    }

    /// Parse the [`Circuit::to_text`] format.
    pub fn parse_text(text: &str) -> Result<Circuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (first_no, first) = lines.next().ok_or(Error::CircuitParse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let width = first
            .trim()
            .strip_prefix("qubits ")
            .and_then(|w| w.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::CircuitParse {
                line: first_no + 1,
                msg: format!("expected `qubits <width>`, got `{first}`"),
            })?;
        let mut circuit = Circuit::new(width)?;
        for (no, raw) in lines {
            let line = no + 1;
            let mut tokens = raw.split_whitespace();
            let kind = tokens.next().unwrap_or_default();
            let mut qubits = Vec::new();
            let mut alpha = None;
            for tok in tokens {
                if let Some(rest) = tok.strip_prefix("alpha=") {
                    alpha = Some(rest.parse::<f64>().map_err(|e| Error::CircuitParse {
                        line,
                        msg: format!("bad angle `{rest}`: {e}"),
                    })?);
                } else if let Some(idx) = tok
                    .strip_prefix("q[")
                    .and_then(|t| t.strip_suffix(']'))
                    .and_then(|t| t.parse::<usize>().ok())
                {
                    qubits.push(idx);
                } else {
                    return Err(Error::CircuitParse {
                        line,
                        msg: format!("unexpected token `{tok}`"),
                    });
                }
            }
            let gate = match (kind, qubits.as_slice(), alpha) {
                ("H", [q], None) => Gate::h(*q),
                ("X", [q], None) => Gate::x(*q),
                ("PHASE", [q], Some(a)) => Gate::phase(*q, a),
                ("CPHASE", [c, t], Some(a)) => Gate::cphase(*c, *t, a),
                ("SWAP", [a, b], None) => Gate::swap(*a, *b),
                _ => {
                    return Err(Error::CircuitParse {
                        line,
                        msg: format!("malformed gate line `{raw}`"),
                    })
                }
            };
            circuit.push(gate).map_err(|e| Error::CircuitParse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(circuit)
    }
}

/// Quantum Fourier transform over `width` qubits whose unitary equals the
/// DFT matrix with entries `ω^{kj}/√q`, `ω = e^{2πi/q}`, `q = 2^width`.
/// Terminal swaps are included so the matrix matches entrywise.
pub fn qft(width: usize) -> Result<Circuit> {
    let mut c = Circuit::new(width)?;
    for i in (0..width).rev() {
        c.push(Gate::h(i))?;
        for j in (0..i).rev() {
            // Rotation by π/2^{i-j} between the lower qubit j and target i.
            c.push(Gate::cphase(j, i, PI / (1u64 << (i - j)) as f64))?;
        }
    }
    for i in 0..width / 2 {
        c.push(Gate::swap(i, width - 1 - i))?;
    }
    Ok(c)
}

/// Inverse Fourier transform: structurally `qft(width).inverse()`.
pub fn iqft(width: usize) -> Result<Circuit> {
    Ok(qft(width)?.inverse())
}
