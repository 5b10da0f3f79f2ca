//! Native gate matrices.
//!
//! Conventions:
//!
//! * `u(theta, phi, lambda)` — the OpenQASM 2.0 generic rotation
//!   `[[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]]`,
//!   so `u(pi, 0, pi) = X` and `u(pi/2, 0, pi) = H`.
//! * Single-qubit rotations carry the Bloch-sphere half-angle:
//!   `rx(theta) = exp(-i theta X / 2)`, likewise `ry`, `rz`, and
//!   `r(theta, phi) = exp(-i theta (cos(phi) X + sin(phi) Y) / 2)`.
//! * Two-qubit interactions carry the full angle:
//!   `rxx(theta) = exp(-i theta X⊗X)`, `rzz(theta) = exp(-i theta Z⊗Z)`.

use crate::qasm::GateKind;
use num_complex::Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];
/// Row-major 4x4 complex matrix. For gates on `(qa, qb)` the basis index is
/// `bit(qa) + 2*bit(qb)`.
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::ZERO;

fn expi(x: f64) -> Complex64 {
    Complex64::new(x.cos(), x.sin())
}

/// Matrix of a single-qubit gate kind. Panics on two-qubit kinds.
pub fn matrix_1q(kind: GateKind, angles: &[f64]) -> Mat2 {
    match kind {
        GateKind::U => {
            let (t, p, l) = (angles[0], angles[1], angles[2]);
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [
                [Complex64::new(c, 0.0), -expi(l) * s],
                [expi(p) * s, expi(p + l) * c],
            ]
        }
        GateKind::R => {
            let (t, p) = (angles[0], angles[1]);
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            // exp(-i t (cos(p) X + sin(p) Y)/2)
            [
                [Complex64::new(c, 0.0), -Complex64::i() * expi(-p) * s],
                [-Complex64::i() * expi(p) * s, Complex64::new(c, 0.0)],
            ]
        }
        GateKind::RX => {
            let (c, s) = ((angles[0] / 2.0).cos(), (angles[0] / 2.0).sin());
            [
                [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
            ]
        }
        GateKind::RY => {
            let (c, s) = ((angles[0] / 2.0).cos(), (angles[0] / 2.0).sin());
            [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ]
        }
        GateKind::RZ => {
            let h = angles[0] / 2.0;
            [[expi(-h), ZERO], [ZERO, expi(h)]]
        }
        other => panic!("{} is not a single-qubit gate", other.name()),
    }
}

/// Matrix of a two-qubit gate kind (basis `bit(qa) + 2*bit(qb)`, control
/// first for `cx`). Panics on single-qubit kinds.
pub fn matrix_2q(kind: GateKind, angles: &[f64]) -> Mat4 {
    let one = Complex64::ONE;
    match kind {
        GateKind::CX => {
            // control = qa (low bit), target = qb (high bit)
            let mut m = [[ZERO; 4]; 4];
            m[0b00][0b00] = one;
            m[0b11][0b01] = one; // |c=1,t=0> -> |c=1,t=1>
            m[0b10][0b10] = one;
            m[0b01][0b11] = one;
            m
        }
        GateKind::RXX => {
            let (c, s) = (angles[0].cos(), angles[0].sin());
            let (c, is) = (Complex64::new(c, 0.0), Complex64::new(0.0, -s));
            [
                [c, ZERO, ZERO, is],
                [ZERO, c, is, ZERO],
                [ZERO, is, c, ZERO],
                [is, ZERO, ZERO, c],
            ]
        }
        GateKind::RZZ => {
            let e = expi(-angles[0]);
            let f = expi(angles[0]);
            [
                [e, ZERO, ZERO, ZERO],
                [ZERO, f, ZERO, ZERO],
                [ZERO, ZERO, f, ZERO],
                [ZERO, ZERO, ZERO, e],
            ]
        }
        other => panic!("{} is not a two-qubit gate", other.name()),
    }
}
