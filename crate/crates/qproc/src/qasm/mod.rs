//! OpenQASM 2.0 circuit representation, parsing and emission.
//!
//! Circuits are flat instruction lists over `n_qubits` qubit and `n_clbits`
//! classical-bit indices. The supported gate set is the processor's native
//! one: the generic single-qubit rotation `u(theta, phi, lambda)` and `cx`,
//! plus the ion-trap rotations `r`, `rx`, `ry`, `rz` and the two-qubit
//! interactions `rxx`, `rzz`; non-unitary instructions are `measure`,
//! `reset` and `barrier`.
//!
//! Only single-file programs are handled: the conventional
//! `include "qelib1.inc";` line is accepted and ignored (the gate set above
//! is built in), any other include is an error. Gate definitions, opaque
//! declarations and classical control (`if`) are not supported.
//!
//! Bit order is little-endian throughout the crate: qubit 0 is the least
//! significant bit of a basis-state index, and in printed bitstrings the
//! highest-numbered bit is leftmost.

mod emit;
mod parse;

pub use parse::ParseError;

use serde::{Deserialize, Serialize};

/// The unitary gate kinds a [`Circuit`] may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    /// Generic single-qubit rotation `u(theta, phi, lambda)`:
    /// `[[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]]`.
    U,
    /// Controlled-X on (control, target).
    CX,
    /// Equatorial-axis rotation `r(theta, phi) = exp(-i theta (cos(phi) X + sin(phi) Y)/2)`.
    R,
    /// `rx(theta) = exp(-i theta X/2)`.
    RX,
    /// `ry(theta) = exp(-i theta Y/2)`.
    RY,
    /// `rz(theta) = exp(-i theta Z/2)`.
    RZ,
    /// Mølmer-Sørensen-type interaction `rxx(theta) = exp(-i theta X⊗X)`.
    RXX,
    /// Ising interaction `rzz(theta) = exp(-i theta Z⊗Z)`.
    RZZ,
}

impl GateKind {
    /// Lowercase source-level name.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::U => "u",
            GateKind::CX => "cx",
            GateKind::R => "r",
            GateKind::RX => "rx",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::RXX => "rxx",
            GateKind::RZZ => "rzz",
        }
    }

    /// Parses a gate name; the OpenQASM builtins `U`/`CX` are accepted as
    /// aliases for `u`/`cx`.
    pub fn from_name(name: &str) -> Option<GateKind> {
        Some(match name {
            "u" | "U" => GateKind::U,
            "cx" | "CX" => GateKind::CX,
            "r" => GateKind::R,
            "rx" => GateKind::RX,
            "ry" => GateKind::RY,
            "rz" => GateKind::RZ,
            "rxx" => GateKind::RXX,
            "rzz" => GateKind::RZZ,
            _ => return None,
        })
    }

    /// Number of qubit operands.
    pub fn n_qubits(self) -> usize {
        match self {
            GateKind::U | GateKind::R | GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            GateKind::CX | GateKind::RXX | GateKind::RZZ => 2,
        }
    }

    /// Number of angle parameters.
    pub fn n_angles(self) -> usize {
        match self {
            GateKind::U => 3,
            GateKind::R => 2,
            GateKind::CX => 0,
            _ => 1,
        }
    }

    /// All gate kinds, in source-name order.
    pub const ALL: [GateKind; 8] = [
        GateKind::U,
        GateKind::CX,
        GateKind::R,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::RXX,
        GateKind::RZZ,
    ];
}

/// One circuit instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    /// A unitary gate application.
    Gate {
        kind: GateKind,
        /// Angle parameters, `kind.n_angles()` of them.
        angles: Vec<f64>,
        /// Target qubits, `kind.n_qubits()` of them; for `cx` the order is
        /// (control, target).
        qubits: Vec<usize>,
    },
    /// Projective Z-basis measurement of `qubit` into `clbit`.
    Measure { qubit: usize, clbit: usize },
    /// Projective measurement followed by a conditional flip back to |0>.
    Reset { qubit: usize },
    /// Scheduling barrier; no effect on simulation results.
    Barrier { qubits: Vec<usize> },
}

/// A flat quantum circuit over indexed qubits and classical bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_clbits: usize,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    /// Creates an empty circuit. Panics if `n_qubits == 0`.
    pub fn new(n_qubits: usize, n_clbits: usize) -> Circuit {
        assert!(n_qubits >= 1, "circuit needs at least one qubit");
        Circuit {
            n_qubits,
            n_clbits,
            instructions: Vec::new(),
        }
    }

    /// Parses an OpenQASM 2.0 program.
    pub fn from_qasm(src: &str) -> Result<Circuit, ParseError> {
        parse::parse(src)
    }

    /// Emits the circuit as an OpenQASM 2.0 program. Angles are printed with
    /// 17 significant digits so that parsing the output reproduces the exact
    /// same circuit.
    pub fn to_qasm(&self) -> String {
        emit::emit(self)
    }

    /// Appends a gate, checking arity and operand validity.
    ///
    /// Panics on out-of-range or repeated qubits, wrong angle count, or
    /// non-finite angles --- these are programming errors, not input errors.
    pub fn gate(&mut self, kind: GateKind, angles: &[f64], qubits: &[usize]) -> &mut Self {
        assert_eq!(
            angles.len(),
            kind.n_angles(),
            "{} takes {} angle(s)",
            kind.name(),
            kind.n_angles()
        );
        assert_eq!(
            qubits.len(),
            kind.n_qubits(),
            "{} acts on {} qubit(s)",
            kind.name(),
            kind.n_qubits()
        );
        for &a in angles {
            assert!(a.is_finite(), "gate angle must be finite, got {a}");
        }
        for &q in qubits {
            assert!(q < self.n_qubits, "qubit index {q} out of range");
        }
        if qubits.len() == 2 {
            assert_ne!(qubits[0], qubits[1], "two-qubit gate needs distinct qubits");
        }
        self.instructions.push(Instruction::Gate {
            kind,
            angles: angles.to_vec(),
            qubits: qubits.to_vec(),
        });
        self
    }

    pub fn u(&mut self, q: usize, theta: f64, phi: f64, lambda: f64) -> &mut Self {
        self.gate(GateKind::U, &[theta, phi, lambda], &[q])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.gate(GateKind::CX, &[], &[control, target])
    }

    pub fn r(&mut self, q: usize, theta: f64, phi: f64) -> &mut Self {
        self.gate(GateKind::R, &[theta, phi], &[q])
    }

    pub fn rx(&mut self, q: usize, theta: f64) -> &mut Self {
        self.gate(GateKind::RX, &[theta], &[q])
    }

    pub fn ry(&mut self, q: usize, theta: f64) -> &mut Self {
        self.gate(GateKind::RY, &[theta], &[q])
    }

    pub fn rz(&mut self, q: usize, theta: f64) -> &mut Self {
        self.gate(GateKind::RZ, &[theta], &[q])
    }

    pub fn rxx(&mut self, a: usize, b: usize, theta: f64) -> &mut Self {
        self.gate(GateKind::RXX, &[theta], &[a, b])
    }

    pub fn rzz(&mut self, a: usize, b: usize, theta: f64) -> &mut Self {
        self.gate(GateKind::RZZ, &[theta], &[a, b])
    }

    /// Appends a measurement of `qubit` into `clbit`.
    pub fn measure(&mut self, qubit: usize, clbit: usize) -> &mut Self {
        assert!(qubit < self.n_qubits, "qubit index {qubit} out of range");
        assert!(clbit < self.n_clbits, "clbit index {clbit} out of range");
        self.instructions.push(Instruction::Measure { qubit, clbit });
        self
    }

    /// Measures qubit `i` into clbit `i` for every qubit. Panics unless
    /// `n_clbits >= n_qubits`.
    pub fn measure_all(&mut self) -> &mut Self {
        assert!(self.n_clbits >= self.n_qubits, "not enough classical bits");
        for q in 0..self.n_qubits {
            self.measure(q, q);
        }
        self
    }

    pub fn reset(&mut self, qubit: usize) -> &mut Self {
        assert!(qubit < self.n_qubits, "qubit index {qubit} out of range");
        self.instructions.push(Instruction::Reset { qubit });
        self
    }

    pub fn barrier(&mut self, qubits: &[usize]) -> &mut Self {
        for &q in qubits {
            assert!(q < self.n_qubits, "qubit index {q} out of range");
        }
        self.instructions.push(Instruction::Barrier {
            qubits: qubits.to_vec(),
        });
        self
    }

    /// True when the circuit contains neither measurements nor resets.
    pub fn is_unitary_only(&self) -> bool {
        self.instructions.iter().all(|i| {
            matches!(
                i,
                Instruction::Gate { .. } | Instruction::Barrier { .. }
            )
        })
    }

    /// True when every measurement comes after the last gate/reset, i.e. the
    /// measurement layer is terminal.
    pub fn measurements_are_terminal(&self) -> bool {
        let last_nonmeasure = self
            .instructions
            .iter()
            .rposition(|i| matches!(i, Instruction::Gate { .. } | Instruction::Reset { .. }));
        let first_measure = self
            .instructions
            .iter()
            .position(|i| matches!(i, Instruction::Measure { .. }));
        match (last_nonmeasure, first_measure) {
            (Some(g), Some(m)) => m > g,
            _ => true,
        }
    }
}
