//! Dense state-vector simulation.
//!
//! [`StateVector`] holds the full `2^n` complex amplitude vector in
//! little-endian order (qubit 0 is the least significant bit of a basis
//! index) and applies gates with in-place stride kernels. The executor
//! ([`sample`], [`run_shot`], [`probabilities`]) layers shot sampling,
//! measurement and the stochastic noise machinery from [`crate::noise`] on
//! top.
//!
//! Qubit counts are capped (default [`DEFAULT_MAX_QUBITS`]) to guard against
//! accidental exponential blowups; the cap is configurable via
//! [`SimOptions`].

mod exec;
mod gates;

pub use exec::{
    probabilities, probabilities_opts, run_shot, sample, sample_opts, CountsHistogram,
    Distribution, SimOptions,
};
pub use gates::{matrix_1q, matrix_2q, Mat2, Mat4};

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Default qubit cap for [`StateVector::new`].
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Simulation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("circuit uses {n} qubits, exceeding the cap of {cap} (raise it explicitly if intended)")]
    TooManyQubits { n: usize, cap: usize },
    #[error("exact probabilities need a unitary circuit, but it contains `{0}`")]
    NonUnitaryInstruction(&'static str),
    #[error("Pauli string `{string}` does not fit a {n}-qubit state")]
    PauliLength { string: String, n: usize },
    #[error("Pauli string contains `{0}`; allowed letters are I, X, Y, Z")]
    PauliLetter(char),
    #[error("noise error: {0}")]
    Noise(#[from] crate::noise::NoiseError),
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

/// Dense `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits, `1 <= n <=` [`DEFAULT_MAX_QUBITS`].
    pub fn new(n: usize) -> Result<StateVector, SimError> {
        StateVector::with_cap(n, DEFAULT_MAX_QUBITS)
    }

    /// `|0...0>` with an explicit qubit cap.
    pub fn with_cap(n: usize, cap: usize) -> Result<StateVector, SimError> {
        if n == 0 || n > cap {
            return Err(SimError::TooManyQubits { n, cap });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        Ok(StateVector { n, amps })
    }

    /// Builds a state from raw amplitudes (length must be a power of two).
    /// The vector is normalized; an all-zero vector is rejected.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::Internal(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        let mut st = StateVector { n, amps };
        let norm = st.norm();
        if norm < 1e-14 {
            return Err(SimError::Internal("amplitude vector has zero norm".into()));
        }
        for a in &mut st.amps {
            *a /= norm;
        }
        Ok(st)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm (used after stochastic channel application).
    pub fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    /// Applies a 2x2 matrix to qubit `q`.
    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        debug_assert!(q < self.n);
        let mask = 1usize << q;
        let half = self.amps.len() >> 1;
        for k in 0..half {
            let low = k & (mask - 1);
            let high = (k ^ low) << 1;
            let i0 = high | low;
            let i1 = i0 | mask;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Applies a 4x4 matrix to the ordered qubit pair `(qa, qb)`.
    ///
    /// The local two-bit index is `bit(qa) + 2*bit(qb)`, i.e. `qa` is the low
    /// bit of the matrix's basis.
    pub fn apply_2q(&mut self, qa: usize, qb: usize, m: &Mat4) {
        debug_assert!(qa < self.n && qb < self.n && qa != qb);
        let ma = 1usize << qa;
        let mb = 1usize << qb;
        let (lo_mask, hi_mask) = (ma.min(mb), ma.max(mb));
        let quarter = self.amps.len() >> 2;
        for k in 0..quarter {
            // Spread k over the index bits that are neither qa nor qb.
            let low = k & (lo_mask - 1);
            let shifted = (k ^ low) << 1;
            let mid = shifted & (hi_mask - 1);
            let high = (shifted ^ mid) << 1;
            let base = high | mid | low;
            let i = [base, base | ma, base | mb, base | ma | mb];
            let a = [
                self.amps[i[0]],
                self.amps[i[1]],
                self.amps[i[2]],
                self.amps[i[3]],
            ];
            for r in 0..4 {
                self.amps[i[r]] =
                    m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
            }
        }
    }

    /// Fast controlled-X.
    pub fn apply_cx(&mut self, control: usize, target: usize) {
        debug_assert!(control < self.n && target < self.n && control != target);
        let cm = 1usize << control;
        let tm = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// Fast X (used for SPAM preparation flips and reset).
    pub fn apply_x(&mut self, q: usize) {
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    /// Applies one unitary gate instruction.
    pub fn apply_gate(&mut self, kind: crate::qasm::GateKind, angles: &[f64], qubits: &[usize]) {
        use crate::qasm::GateKind as G;
        match kind {
            G::CX => self.apply_cx(qubits[0], qubits[1]),
            G::U | G::R | G::RX | G::RY | G::RZ => {
                self.apply_1q(qubits[0], &matrix_1q(kind, angles))
            }
            G::RXX | G::RZZ => self.apply_2q(qubits[0], qubits[1], &matrix_2q(kind, angles)),
        }
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let mask = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projective Z-basis measurement of qubit `q` with collapse.
    pub fn measure<R: Rng>(&mut self, q: usize, rng: &mut R) -> Result<u8, SimError> {
        let p0 = self.prob_zero(q);
        if !(-1e-9..=1.0 + 1e-9).contains(&p0) {
            return Err(SimError::Internal(format!(
                "measurement probability {p0} outside [0,1]"
            )));
        }
        let p0 = p0.clamp(0.0, 1.0);
        let outcome = u8::from(rng.random::<f64>() >= p0);
        let mask = 1usize << q;
        let keep_set = outcome == 1;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & mask) != 0) != keep_set {
                *a = Complex64::ZERO;
            }
        }
        self.renormalize();
        Ok(outcome)
    }

    /// Probabilities of all `2^n` basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Expectation value of a Pauli string.
    ///
    /// The string has one letter in `{I, X, Y, Z}` per qubit, leftmost letter
    /// on qubit `n-1` (matching bitstring order).
    pub fn expectation_pauli(&self, pauli: &str) -> Result<f64, SimError> {
        if pauli.chars().count() != self.n {
            return Err(SimError::PauliLength {
                string: pauli.into(),
                n: self.n,
            });
        }
        let mut flip = 0usize; // X or Y positions
        let mut phase_mask = 0usize; // Y or Z positions contribute (-1)^bit
        let mut n_y = 0u32;
        for (k, ch) in pauli.chars().enumerate() {
            let q = self.n - 1 - k;
            match ch {
                'I' => {}
                'X' => flip |= 1 << q,
                'Y' => {
                    flip |= 1 << q;
                    phase_mask |= 1 << q;
                    n_y += 1;
                }
                'Z' => phase_mask |= 1 << q,
                other => return Err(SimError::PauliLetter(other)),
            }
        }
        let y_phase = Complex64::i().powu(n_y);
        let mut acc = Complex64::ZERO;
        for (i, &a) in self.amps.iter().enumerate() {
            let sign = if (i & phase_mask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += self.amps[i ^ flip].conj() * y_phase * sign * a;
        }
        Ok(acc.re)
    }
}
