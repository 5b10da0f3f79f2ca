//! Textbook benchmark circuits: Bernstein-Vazirani, Grover search, GHZ
//! preparation, and the swap test, plus the ancilla-free multi-controlled
//! phase decomposition they build on.

use super::CircuitsError;
use crate::qasm::Circuit;
use std::f64::consts::{FRAC_PI_2, PI};

fn h(c: &mut Circuit, q: usize) {
    c.u(q, FRAC_PI_2, 0.0, PI);
}

fn x(c: &mut Circuit, q: usize) {
    c.u(q, PI, 0.0, PI);
}

fn p(c: &mut Circuit, q: usize, lambda: f64) {
    c.u(q, 0.0, 0.0, lambda);
}

fn cp(c: &mut Circuit, a: usize, b: usize, lambda: f64) {
    p(c, a, lambda / 2.0);
    c.cx(a, b);
    p(c, b, -lambda / 2.0);
    c.cx(a, b);
    p(c, b, lambda / 2.0);
}

/// Appends a phase of `e^{i lambda}` on the all-ones subspace of
/// `controls + target` — an ancilla-free recursive two-level decomposition
/// into CX and U gates. With no controls this is a plain phase gate.
/// The gate count grows exponentially with the control count, which is
/// fine at benchmark scale.
pub fn multi_controlled_phase(
    c: &mut Circuit,
    controls: &[usize],
    target: usize,
    lambda: f64,
) -> Result<(), CircuitsError> {
    let mut seen = controls.to_vec();
    seen.push(target);
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(CircuitsError::Param(
            "controls and target must be distinct".into(),
        ));
    }
    if seen.last().is_some_and(|&q| q >= c.n_qubits) {
        return Err(CircuitsError::Param(format!(
            "qubit index {} out of range for {} qubits",
            seen.last().unwrap(),
            c.n_qubits
        )));
    }
    mcp(c, controls, target, lambda);
    Ok(())
}

fn mcp(c: &mut Circuit, controls: &[usize], target: usize, lambda: f64) {
    match controls {
        [] => p(c, target, lambda),
        [a] => cp(c, *a, target, lambda),
        [rest @ .., last] => {
            cp(c, *last, target, lambda / 2.0);
            mcx(c, rest, *last);
            cp(c, *last, target, -lambda / 2.0);
            mcx(c, rest, *last);
            mcp(c, rest, target, lambda / 2.0);
        }
    }
}

fn mcx(c: &mut Circuit, controls: &[usize], target: usize) {
    match controls {
        [] => x(c, target),
        [a] => {
            c.cx(*a, target);
        }
        _ => {
            h(c, target);
            mcp(c, controls, target, PI);
            h(c, target);
        }
    }
}

fn cswap(c: &mut Circuit, control: usize, a: usize, b: usize) {
    c.cx(b, a);
    mcx(c, &[control, a], b);
    c.cx(b, a);
}

/// Bernstein-Vazirani circuit for a secret bitstring `s` (leftmost
/// character is the most significant bit). Noiseless sampling returns `s`
/// with probability 1; the oracle uses one CX per 1-bit of `s`.
pub fn bernstein_vazirani(s: &str) -> Result<Circuit, CircuitsError> {
    if s.is_empty() || s.chars().any(|ch| ch != '0' && ch != '1') {
        return Err(CircuitsError::Param(format!(
            "secret must be a nonempty bitstring, got {s:?}"
        )));
    }
    let n = s.len();
    let bytes = s.as_bytes();
    let mut c = Circuit::new(n + 1, n);
    // Ancilla (qubit n) in |->; data qubits in |+>.
    x(&mut c, n);
    for q in 0..=n {
        h(&mut c, q);
    }
    // Oracle: kickback from each qubit whose secret bit is 1. Output
    // strings print clbit n-1 leftmost, so qubit i carries s[n-1-i].
    for q in 0..n {
        if bytes[n - 1 - q] == b'1' {
            c.cx(q, n);
        }
    }
    for q in 0..n {
        h(&mut c, q);
        c.measure(q, q);
    }
    Ok(c)
}

/// Grover search over `n` qubits for the basis state `marked`, running
/// `iterations` rounds of phase oracle plus diffusion (both built on the
/// ancilla-free multi-controlled Z). Measures all qubits.
pub fn grover(n: usize, marked: u64, iterations: usize) -> Result<Circuit, CircuitsError> {
    if n == 0 || n >= 64 {
        return Err(CircuitsError::Param(format!(
            "qubit count must be in 1..=63, got {n}"
        )));
    }
    if marked < 1 || marked >= (1u64 << n) {
        return Err(CircuitsError::Param(format!(
            "marked index {marked} outside 1..2^{n}"
        )));
    }
    let mut c = Circuit::new(n, n);
    for q in 0..n {
        h(&mut c, q);
    }
    let controls: Vec<usize> = (0..n - 1).collect();
    let mcz = |c: &mut Circuit| {
        if n == 1 {
            p(c, 0, PI);
        } else {
            mcp(c, &controls, n - 1, PI);
        }
    };
    for _ in 0..iterations {
        // Oracle: flip the phase of |marked> only.
        for q in 0..n {
            if (marked >> q) & 1 == 0 {
                x(&mut c, q);
            }
        }
        mcz(&mut c);
        for q in 0..n {
            if (marked >> q) & 1 == 0 {
                x(&mut c, q);
            }
        }
        // Diffusion: inversion about the mean.
        for q in 0..n {
            h(&mut c, q);
            x(&mut c, q);
        }
        mcz(&mut c);
        for q in 0..n {
            x(&mut c, q);
            h(&mut c, q);
        }
    }
    c.measure_all();
    Ok(c)
}

/// GHZ state preparation on `n >= 2` qubits (H plus a CX chain), measuring
/// every qubit: noiseless sampling yields only the all-zeros and all-ones
/// strings, each with probability 1/2.
pub fn ghz(n: usize) -> Result<Circuit, CircuitsError> {
    if n < 2 {
        return Err(CircuitsError::Param(format!(
            "GHZ needs at least 2 qubits, got {n}"
        )));
    }
    let mut c = Circuit::new(n, n);
    h(&mut c, 0);
    for q in 0..n - 1 {
        c.cx(q, q + 1);
    }
    c.measure_all();
    Ok(c)
}

/// Swap test comparing two `m`-qubit registers: ancilla on qubit 0,
/// register A on qubits `1..=m`, register B on qubits `m+1..=2m`. The
/// ancilla measures 0 with probability `(1 + |<phi|psi>|^2) / 2`. Both
/// registers start in |0...0>; callers prepend their own state
/// preparation.
pub fn swap_test(m: usize) -> Result<Circuit, CircuitsError> {
    if m == 0 {
        return Err(CircuitsError::Param(
            "registers need at least 1 qubit".into(),
        ));
    }
    let mut c = Circuit::new(2 * m + 1, 1);
    h(&mut c, 0);
    for i in 0..m {
        cswap(&mut c, 0, 1 + i, 1 + m + i);
    }
    h(&mut c, 0);
    c.measure(0, 0);
    Ok(c)
}
