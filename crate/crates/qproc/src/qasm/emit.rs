//! OpenQASM 2.0 emitter.

use super::{Circuit, Instruction};
use std::fmt::Write;

/// Formats an angle with 17 significant digits, enough for the reader to
/// reconstruct the exact f64 bit pattern.
fn fmt_angle(x: f64) -> String {
    format!("{x:.16e}")
}

pub(super) fn emit(c: &Circuit) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\n");
    s.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.n_qubits);
    if c.n_clbits > 0 {
        let _ = writeln!(s, "creg c[{}];", c.n_clbits);
    }
    for ins in &c.instructions {
        match ins {
            Instruction::Gate { kind, angles, qubits } => {
                s.push_str(kind.name());
                if !angles.is_empty() {
                    let list: Vec<String> = angles.iter().map(|&a| fmt_angle(a)).collect();
                    let _ = write!(s, "({})", list.join(","));
                }
                let targets: Vec<String> = qubits.iter().map(|q| format!("q[{q}]")).collect();
                let _ = writeln!(s, " {};", targets.join(","));
            }
            Instruction::Measure { qubit, clbit } => {
                let _ = writeln!(s, "measure q[{qubit}] -> c[{clbit}];");
            }
            Instruction::Reset { qubit } => {
                let _ = writeln!(s, "reset q[{qubit}];");
            }
            Instruction::Barrier { qubits } => {
                let targets: Vec<String> = qubits.iter().map(|q| format!("q[{q}]")).collect();
                let _ = writeln!(s, "barrier {};", targets.join(","));
            }
        }
    }
    s
}
