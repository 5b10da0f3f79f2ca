//! Suzuki-Trotter product-formula circuits for time evolution under a
//! Pauli-sum Hamiltonian.
//!
//! Terms are first grouped into mutually commuting families
//! ([`group_commuting`](super::pauli::group_commuting)); within a family the
//! exponentials factor exactly, so the product formula only has to
//! interleave the families. Each `exp(-i theta P)` factor compiles to a
//! basis change (H for X, RX(+-pi/2) for Y), a CX parity ladder, an
//! `rz(2 theta)` on the ladder end, and the unconversion.

use super::pauli::{group_commuting, PauliHamiltonian};
use super::CircuitsError;
use crate::qasm::Circuit;
use std::f64::consts::{FRAC_PI_2, PI};

/// The standard Suzuki splitting coefficient `s_k = (4 - 4^{1/(2k-1)})^{-1}`
/// used to build the order-`2k` formula from order `2k-2`; defined for
/// `k >= 2` (`s_2` is about 0.41449).
pub fn suzuki_coefficient(k: u32) -> Result<f64, CircuitsError> {
    if k < 2 {
        return Err(CircuitsError::Param(format!(
            "splitting coefficient defined for k >= 2, got {k}"
        )));
    }
    Ok(1.0 / (4.0 - 4.0f64.powf(1.0 / (2.0 * k as f64 - 1.0))))
}

/// Builds the order-`order` product-formula circuit for `exp(-i t H)` with
/// `r` repetitions. `order` is 1 or any even number; each doubling of the
/// even order applies the five-fold Suzuki recursion. Identity-only terms
/// are rejected (they contribute only a global phase).
pub fn trotter_circuit(
    h: &PauliHamiltonian,
    t: f64,
    r: usize,
    order: usize,
) -> Result<Circuit, CircuitsError> {
    if !t.is_finite() {
        return Err(CircuitsError::Param(format!("time must be finite, got {t}")));
    }
    if r == 0 {
        return Err(CircuitsError::Param("need at least one step".into()));
    }
    if order == 0 || (order > 1 && order % 2 != 0) {
        return Err(CircuitsError::Param(format!(
            "order must be 1 or even, got {order}"
        )));
    }
    // Support of each term as (qubit, letter) pairs, low qubit first.
    let n = h.n_qubits();
    let supports: Vec<Vec<(usize, char)>> = h
        .terms()
        .iter()
        .map(|(_, p)| {
            let mut sup: Vec<(usize, char)> = p
                .chars()
                .enumerate()
                .filter(|&(_, ch)| ch != 'I')
                .map(|(pos, ch)| (n - 1 - pos, ch))
                .collect();
            sup.sort_unstable_by_key(|&(q, _)| q);
            sup
        })
        .collect();
    if let Some(idx) = supports.iter().position(|s| s.is_empty()) {
        return Err(CircuitsError::Param(format!(
            "term {idx} is identity on every qubit; fold it into a constant instead"
        )));
    }
    let families = group_commuting(h);

    let mut c = Circuit::new(n, 0);
    let dt = t / r as f64;
    for _ in 0..r {
        emit_step(&mut c, h, &supports, &families, dt, order)?;
    }
    Ok(c)
}

/// One product-formula step for time `dt` at the given order.
fn emit_step(
    c: &mut Circuit,
    h: &PauliHamiltonian,
    supports: &[Vec<(usize, char)>],
    families: &[Vec<usize>],
    dt: f64,
    order: usize,
) -> Result<(), CircuitsError> {
    match order {
        1 => {
            for fam in families {
                emit_family(c, h, supports, fam, dt);
            }
        }
        2 => {
            for fam in families {
                emit_family(c, h, supports, fam, dt / 2.0);
            }
            for fam in families.iter().rev() {
                emit_family(c, h, supports, fam, dt / 2.0);
            }
        }
        _ => {
            let k = order / 2;
            let s = suzuki_coefficient(k as u32)?;
            for _ in 0..2 {
                emit_step(c, h, supports, families, s * dt, order - 2)?;
            }
            emit_step(c, h, supports, families, (1.0 - 4.0 * s) * dt, order - 2)?;
            for _ in 0..2 {
                emit_step(c, h, supports, families, s * dt, order - 2)?;
            }
        }
    }
    Ok(())
}

fn emit_family(
    c: &mut Circuit,
    h: &PauliHamiltonian,
    supports: &[Vec<(usize, char)>],
    family: &[usize],
    dt: f64,
) {
    for &idx in family {
        let (coeff, _) = &h.terms()[idx];
        emit_pauli_exp(c, coeff * dt, &supports[idx]);
    }
}

/// Appends `exp(-i theta P)` for the Pauli with the given support.
fn emit_pauli_exp(c: &mut Circuit, theta: f64, support: &[(usize, char)]) {
    // Into the Z basis: X = H Z H, Y = RX(-pi/2) Z RX(pi/2).
    for &(q, ch) in support {
        match ch {
            'X' => {
                c.u(q, FRAC_PI_2, 0.0, PI);
            }
            'Y' => {
                c.rx(q, FRAC_PI_2);
            }
            _ => {}
        }
    }
    // Parity ladder onto the highest support qubit, phase, unwind.
    let qubits: Vec<usize> = support.iter().map(|&(q, _)| q).collect();
    for w in qubits.windows(2) {
        c.cx(w[0], w[1]);
    }
    c.rz(*qubits.last().expect("nonempty support"), 2.0 * theta);
    for w in qubits.windows(2).rev() {
        c.cx(w[0], w[1]);
    }
    for &(q, ch) in support {
        match ch {
            'X' => {
                c.u(q, FRAC_PI_2, 0.0, PI);
            }
            'Y' => {
                c.rx(q, -FRAC_PI_2);
            }
            _ => {}
        }
    }
}
