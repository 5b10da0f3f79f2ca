//! Shared oracles for the acceptance suite.
//!
//! Everything here is written independently of the library's simulator:
//! gates are dense matrices assembled from first principles, circuits are
//! evaluated by full matrix products, and noise channels evolve an explicit
//! density matrix. The library is correct when it agrees with these.

#![allow(dead_code)] // each acceptance test pulls in only part of the toolbox

use nalgebra::DMatrix;
use num_complex::Complex64;
use qproc::qasm::{Circuit, GateKind, Instruction};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Dense gate matrices (independent definitions)
// ---------------------------------------------------------------------------

/// U(theta, phi, lambda) in the convention
/// [[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]].
pub fn u_mat(theta: f64, phi: f64, lambda: f64) -> CMat {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMat::from_row_slice(
        2,
        2,
        &[
            c(ct, 0.0),
            -Complex64::from_polar(st, lambda),
            Complex64::from_polar(st, phi),
            Complex64::from_polar(ct, phi + lambda),
        ],
    )
}

pub fn rx_mat(theta: f64) -> CMat {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMat::from_row_slice(2, 2, &[c(ch, 0.0), c(0.0, -sh), c(0.0, -sh), c(ch, 0.0)])
}

pub fn ry_mat(theta: f64) -> CMat {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMat::from_row_slice(2, 2, &[c(ch, 0.0), c(-sh, 0.0), c(sh, 0.0), c(ch, 0.0)])
}

pub fn rz_mat(theta: f64) -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(1.0, -theta / 2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, theta / 2.0),
        ],
    )
}

/// R(theta, phi) = exp(-i theta/2 (cos(phi) X + sin(phi) Y)).
pub fn r_mat(theta: f64, phi: f64) -> CMat {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMat::from_row_slice(
        2,
        2,
        &[
            c(ch, 0.0),
            c(0.0, -1.0) * Complex64::from_polar(sh, -phi),
            c(0.0, -1.0) * Complex64::from_polar(sh, phi),
            c(ch, 0.0),
        ],
    )
}

/// Two-qubit matrices act on the local index `b0 + 2*b1` where bit 0 is the
/// first listed qubit and bit 1 the second.
pub fn cx_mat() -> CMat {
    // control = first listed qubit (local bit 0), target = second.
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0); // |c=0,t=0>
    m[(2, 2)] = c(1.0, 0.0); // |c=0,t=1>
    m[(3, 1)] = c(1.0, 0.0); // |c=1,t=0> -> |c=1,t=1>
    m[(1, 3)] = c(1.0, 0.0); // |c=1,t=1> -> |c=1,t=0>
    m
}

/// RXX(theta) = cos(theta) I - i sin(theta) X(x)X (full-angle convention).
pub fn rxx_mat(theta: f64) -> CMat {
    let (ch, sh) = (theta.cos(), theta.sin());
    let mut m = CMat::zeros(4, 4);
    for i in 0..4 {
        m[(i, i)] = c(ch, 0.0);
        m[(i, 3 - i)] = c(0.0, -sh);
    }
    m
}

/// RZZ(theta) = diag(e^{-i t}, e^{i t}, e^{i t}, e^{-i t}) (full-angle
/// convention).
pub fn rzz_mat(theta: f64) -> CMat {
    let mut m = CMat::zeros(4, 4);
    for i in 0..4usize {
        let sign = if (i.count_ones() % 2) == 0 { -1.0 } else { 1.0 };
        m[(i, i)] = Complex64::from_polar(1.0, sign * theta);
    }
    m
}

pub fn gate_matrix(kind: GateKind, angles: &[f64]) -> CMat {
    match kind {
        GateKind::U => u_mat(angles[0], angles[1], angles[2]),
        GateKind::CX => cx_mat(),
        GateKind::R => r_mat(angles[0], angles[1]),
        GateKind::RX => rx_mat(angles[0]),
        GateKind::RY => ry_mat(angles[0]),
        GateKind::RZ => rz_mat(angles[0]),
        GateKind::RXX => rxx_mat(angles[0]),
        GateKind::RZZ => rzz_mat(angles[0]),
    }
}

// ---------------------------------------------------------------------------
// Dense embedding and circuit evaluation
// ---------------------------------------------------------------------------

/// Embeds a 2x2 matrix acting on qubit `q` into the full 2^n space
/// (basis index bit `q` is qubit `q`).
pub fn embed_1q(m: &CMat, q: usize, n: usize) -> CMat {
    let dim = 1 << n;
    CMat::from_fn(dim, dim, |row, col| {
        if (row & !(1 << q)) != (col & !(1 << q)) {
            c(0.0, 0.0)
        } else {
            m[((row >> q) & 1, (col >> q) & 1)]
        }
    })
}

/// Embeds a 4x4 matrix on qubits `(qa, qb)`; the matrix's local index is
/// `bit(qa) + 2*bit(qb)`.
pub fn embed_2q(m: &CMat, qa: usize, qb: usize, n: usize) -> CMat {
    assert_ne!(qa, qb);
    let dim = 1 << n;
    let mask = (1usize << qa) | (1usize << qb);
    CMat::from_fn(dim, dim, |row, col| {
        if (row & !mask) != (col & !mask) {
            c(0.0, 0.0)
        } else {
            let lr = ((row >> qa) & 1) | (((row >> qb) & 1) << 1);
            let lc = ((col >> qa) & 1) | (((col >> qb) & 1) << 1);
            m[(lr, lc)]
        }
    })
}

pub fn embed_gate(kind: GateKind, angles: &[f64], qubits: &[usize], n: usize) -> CMat {
    let g = gate_matrix(kind, angles);
    match qubits.len() {
        1 => embed_1q(&g, qubits[0], n),
        2 => embed_2q(&g, qubits[0], qubits[1], n),
        _ => unreachable!("gates act on 1 or 2 qubits"),
    }
}

/// Full circuit unitary as an explicit product of dense embedded gates.
/// Measurements and barriers are ignored.
pub fn circuit_unitary(circuit: &Circuit) -> CMat {
    let n = circuit.n_qubits;
    let mut total = CMat::identity(1 << n, 1 << n);
    for inst in &circuit.instructions {
        if let Instruction::Gate { kind, angles, qubits } = inst {
            total = embed_gate(*kind, angles, qubits, n) * total;
        }
    }
    total
}

/// Output probabilities of a unitary circuit from the dense product,
/// starting in |0...0>.
pub fn oracle_probabilities(circuit: &Circuit) -> Vec<f64> {
    let u = circuit_unitary(circuit);
    (0..u.nrows()).map(|i| u[(i, 0)].norm_sqr()).collect()
}

// ---------------------------------------------------------------------------
// Density-matrix evolution (exact superoperator oracle)
// ---------------------------------------------------------------------------

pub struct DensityOracle {
    pub n: usize,
    pub rho: CMat,
}

impl DensityOracle {
    pub fn new(n: usize) -> DensityOracle {
        let dim = 1 << n;
        let mut rho = CMat::zeros(dim, dim);
        rho[(0, 0)] = c(1.0, 0.0);
        DensityOracle { n, rho }
    }

    pub fn apply_unitary(&mut self, full: &CMat) {
        self.rho = full * &self.rho * full.adjoint();
    }

    pub fn apply_gate(&mut self, kind: GateKind, angles: &[f64], qubits: &[usize]) {
        let full = embed_gate(kind, angles, qubits, self.n);
        self.apply_unitary(&full);
    }

    /// Applies a single-qubit Kraus channel to qubit `q`.
    pub fn apply_kraus_1q(&mut self, kraus: &[CMat], q: usize) {
        let dim = self.rho.nrows();
        let mut out = CMat::zeros(dim, dim);
        for k in kraus {
            let full = embed_1q(k, q, self.n);
            out += &full * &self.rho * full.adjoint();
        }
        self.rho = out;
    }

    /// Applies a two-qubit Kraus channel to the pair `(qa, qb)`, with the
    /// Kraus matrices' local bit 0 on `qa`.
    pub fn apply_kraus_2q(&mut self, kraus: &[CMat], qa: usize, qb: usize) {
        let dim = self.rho.nrows();
        let mut out = CMat::zeros(dim, dim);
        for k in kraus {
            let full = embed_2q(k, qa, qb, self.n);
            out += &full * &self.rho * full.adjoint();
        }
        self.rho = out;
    }

    /// Z-basis outcome distribution (index bit q = qubit q).
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re).collect()
    }
}

/// Textbook amplitude-damping Kraus pair.
pub fn amplitude_kraus(a: f64) -> Vec<CMat> {
    vec![
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - a).sqrt(), 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(a.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
    ]
}

/// Textbook single-qubit depolarizing Kraus quadruple.
pub fn depolarizing_kraus(p: f64) -> Vec<CMat> {
    let w = (p / 3.0).sqrt();
    vec![
        CMat::from_row_slice(2, 2, &[c((1.0 - p).sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - p).sqrt(), 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(w, 0.0), c(w, 0.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -w), c(0.0, w), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(w, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-w, 0.0)]),
    ]
}

/// Textbook two-qubit depolarizing Kraus set: identity pair weighted
/// `sqrt(1-p)`, the 15 remaining Pauli pairs `sqrt(p/15)` each. Local index
/// convention: bit 0 = first qubit of the pair.
pub fn depolarizing2_kraus(p: f64) -> Vec<CMat> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut out = Vec::with_capacity(16);
    for a in 0..4 {
        // Pauli on local bit 0
        for b in 0..4 {
            // Pauli on local bit 1
            let w = if a == 0 && b == 0 {
                (1.0 - p).sqrt()
            } else {
                (p / 15.0).sqrt()
            };
            // pauli_matrix puts the leftmost letter on the high bit.
            let m = pauli_matrix(&format!("{}{}", letters[b], letters[a]));
            out.push(m.map(|z| z * w));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Linear-algebra helpers
// ---------------------------------------------------------------------------

/// exp(-i t H) for Hermitian H, by eigendecomposition.
pub fn evolve_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let d = h.nrows();
    let mut out = CMat::zeros(d, d);
    for k in 0..d {
        let phase = Complex64::from_polar(1.0, -t * eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        for r in 0..d {
            for s in 0..d {
                out[(r, s)] += phase * v[r] * v[s].conj();
            }
        }
    }
    out
}

/// Spectral norm ||A||_2 (largest singular value).
pub fn operator_norm(a: &CMat) -> f64 {
    a.clone().svd(false, false).singular_values.max()
}

/// Dense matrix of a Pauli string; the leftmost character acts on the
/// highest-numbered qubit (index bit q = qubit q).
pub fn pauli_matrix(s: &str) -> CMat {
    let id = CMat::identity(2, 2);
    let x = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let y = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let z = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let mut out = CMat::identity(1, 1);
    for ch in s.chars() {
        let f = match ch {
            'I' => &id,
            'X' => &x,
            'Y' => &y,
            'Z' => &z,
            _ => panic!("bad Pauli letter {ch}"),
        };
        // nalgebra's kronecker puts the first factor on the high bits, so
        // left-to-right accumulation matches leftmost = highest qubit.
        out = out.kronecker(f);
    }
    out
}

/// Dense matrix of a weighted Pauli sum.
pub fn hamiltonian_matrix(terms: &[(f64, String)]) -> CMat {
    let n = terms[0].1.len();
    let dim = 1 << n;
    let mut h = CMat::zeros(dim, dim);
    for (coeff, s) in terms {
        h += pauli_matrix(s).map(|z| z * *coeff);
    }
    h
}

// ---------------------------------------------------------------------------
// Statistics helpers
// ---------------------------------------------------------------------------

/// Total-variation distance between two distributions over the same index
/// set: max over events |P(A) - Q(A)| = 1/2 sum |p_i - q_i|.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Pearson chi-square goodness-of-fit p-value of observed counts against
/// expected probabilities. Bins with expected count < 5 are pooled into one.
pub fn chi2_pvalue(observed: &[u64], expected_probs: &[f64], total: u64) -> f64 {
    assert_eq!(observed.len(), expected_probs.len());
    let mut chi2 = 0.0;
    let mut bins = 0usize;
    let mut pooled_obs = 0.0;
    let mut pooled_exp = 0.0;
    for (&o, &pe) in observed.iter().zip(expected_probs) {
        let e = pe * total as f64;
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            chi2 += (o as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pooled_exp > 0.0 {
        chi2 += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    if bins < 2 {
        return 1.0; // nothing to test
    }
    let dof = (bins - 1) as f64;
    let dist = ChiSquared::new(dof).expect("dof >= 1");
    1.0 - dist.cdf(chi2)
}

/// Draws `shots` multinomial counts from `probs`.
pub fn multinomial<R: Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let mut u: f64 = rng.random();
        let mut idx = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            if u < p {
                idx = i;
                break;
            }
            u -= p;
        }
        counts[idx] += 1;
    }
    counts
}

/// Permanent by direct sum over permutations, O(n! * n).
pub fn naive_permanent(a: &CMat) -> Complex64 {
    fn go(a: &CMat, row: usize, used: u32, acc: Complex64) -> Complex64 {
        let n = a.nrows();
        if row == n {
            return acc;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if used & (1 << col) == 0 {
                sum += go(a, row + 1, used | (1 << col), acc * a[(row, col)]);
            }
        }
        sum
    }
    go(a, 0, 0, Complex64::new(1.0, 0.0))
}

/// All occupation vectors of `parts` nonnegative integers summing to
/// `total`, in lexicographic order.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Converts a little-endian outcome index to the sampler's bitstring key
/// (leftmost character = highest qubit).
pub fn index_to_key(idx: usize, n: usize) -> String {
    (0..n)
        .rev()
        .map(|q| if (idx >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Builds a random circuit over all gate kinds with terminal measurements
/// excluded (unitary-only, for probability comparisons).
pub fn random_circuit<R: Rng>(n: usize, depth: usize, rng: &mut R) -> Circuit {
    use std::f64::consts::PI;
    let mut circ = Circuit::new(n, 0);
    for _ in 0..depth {
        let two_qubit = n >= 2 && rng.random::<f64>() < 0.4;
        if two_qubit {
            let qa = rng.random_range(0..n);
            let mut qb = rng.random_range(0..n - 1);
            if qb >= qa {
                qb += 1;
            }
            match rng.random_range(0..3) {
                0 => circ.cx(qa, qb),
                1 => circ.rxx(qa, qb, rng.random_range(-PI..PI)),
                _ => circ.rzz(qa, qb, rng.random_range(-PI..PI)),
            };
        } else {
            let q = rng.random_range(0..n);
            match rng.random_range(0..5) {
                0 => circ.u(
                    q,
                    rng.random_range(-PI..PI),
                    rng.random_range(-PI..PI),
                    rng.random_range(-PI..PI),
                ),
                1 => circ.r(q, rng.random_range(-PI..PI), rng.random_range(-PI..PI)),
                2 => circ.rx(q, rng.random_range(-PI..PI)),
                3 => circ.ry(q, rng.random_range(-PI..PI)),
                _ => circ.rz(q, rng.random_range(-PI..PI)),
            };
        }
    }
    circ
}
