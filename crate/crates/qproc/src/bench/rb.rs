//! Single-qubit randomized benchmarking.
//!
//! Random sequences of uniformly drawn single-qubit Clifford gates are
//! compiled to native `u` rotations, closed with the exact group inverse,
//! and executed on the simulator. The survival probability of the `0`
//! outcome is fitted to the exponential decay `p(L) = A·γ^L + B`, from
//! which the average gate fidelity `F = (1 + γ) / 2` follows.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::noise::NoiseModel;
use crate::qasm::Circuit;
use crate::rng::{derive_seed, stream_rng};
use crate::sim::{self, Mat2};

use super::BenchError;

/// Order of the single-qubit Clifford group modulo global phase.
pub const CLIFFORD_COUNT: usize = 24;

/// Fitted parameters of the decay model `p(L) = A·γ^L + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbFit {
    /// Amplitude `A` of the decaying term.
    pub a: f64,
    /// Asymptotic offset `B`.
    pub b: f64,
    /// Per-Clifford depolarizing parameter `γ`, clamped to `[0, 1]`.
    pub gamma: f64,
}

/// Outcome of a randomized-benchmarking experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbResult {
    /// Sequence lengths, in the order they were requested.
    pub lengths: Vec<usize>,
    /// Mean survival probability of the `0` outcome at each length.
    pub survival: Vec<f64>,
    /// Fitted decay parameters.
    pub fit: RbFit,
    /// Average gate fidelity `F = 1/d + (1 - 1/d)·γ` with `d = 2`.
    pub avg_gate_fidelity: f64,
}

impl RbResult {
    /// Render the per-length survival data as a `L,survival` CSV table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,survival\n");
        for (l, s) in self.lengths.iter().zip(&self.survival) {
            out.push_str(&format!("{l},{s}\n"));
        }
        out
    }

    /// Serialize the full result as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RbResult serialization cannot fail")
    }
}

// ---------------------------------------------------------------------------
// The single-qubit Clifford group
// ---------------------------------------------------------------------------

struct CliffordTable {
    /// Canonical matrices (first nonzero entry in row-major order real
    /// positive), indexed 0..24 with the identity at index 0. Retained for
    /// verification; sequence generation only needs the index tables.
    #[cfg_attr(not(test), allow(dead_code))]
    mats: Vec<Mat2>,
    /// `u`-gate Euler angles `(theta, phi, lambda)` reproducing each matrix.
    angles: Vec<(f64, f64, f64)>,
    /// Group product: `mul[a][b]` is the index of `mats[a] · mats[b]`.
    mul: Vec<[usize; CLIFFORD_COUNT]>,
    /// Group inverse: `mats[inv[a]] · mats[a]` is the identity.
    inv: Vec<usize>,
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = [[zero; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// Fix the global phase so the first entry with nonzero magnitude (row-major
/// order) becomes real positive. Clifford entries have magnitude 0, 1/√2 or
/// 1, so a 0.25 threshold separates zero from nonzero exactly.
fn canonicalize(m: &Mat2) -> Mat2 {
    let mut out = *m;
    for r in 0..2 {
        for c in 0..2 {
            let e = out[r][c];
            if e.norm() > 0.25 {
                let phase = e / e.norm();
                let corr = phase.conj();
                for row in &mut out {
                    for entry in row.iter_mut() {
                        *entry *= corr;
                    }
                }
                return out;
            }
        }
    }
    out
}

/// Quantized lookup key for a canonical matrix. Distinct canonical Clifford
/// matrices differ by at least ~0.2 in some entry, so rounding to 1e-6
/// collapses only floating-point drift.
fn matrix_key(m: &Mat2) -> [i64; 8] {
    let q = |x: f64| (x * 1e6).round() as i64;
    [
        q(m[0][0].re),
        q(m[0][0].im),
        q(m[0][1].re),
        q(m[0][1].im),
        q(m[1][0].re),
        q(m[1][0].im),
        q(m[1][1].re),
        q(m[1][1].im),
    ]
}

/// Euler angles `(theta, phi, lambda)` of the native gate
/// `u(theta, phi, lambda) = [[cos(θ/2), -e^{iλ} sin(θ/2)],
/// [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]` that reproduces a canonical
/// Clifford matrix exactly, including its global phase.
fn zyz_angles(m: &Mat2) -> (f64, f64, f64) {
    let c = m[0][0].norm();
    let s = m[1][0].norm();
    if s < 0.25 {
        // Diagonal: canonicalization makes m00 = 1, so m11 = e^{i(φ+λ)}.
        (0.0, 0.0, m[1][1].arg())
    } else if c < 0.25 {
        // Anti-diagonal: the first nonzero entry is m01 = -e^{iλ}, made
        // real positive, hence λ = π; then m10 = e^{iφ}.
        (PI, m[1][0].arg(), PI)
    } else {
        // Generic: m00 = cos(θ/2) is real positive by canonicalization.
        let theta = 2.0 * s.atan2(c);
        let phi = m[1][0].arg();
        let lambda = (-m[0][1]).arg();
        (theta, phi, lambda)
    }
}

fn build_clifford_table() -> CliffordTable {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let identity: Mat2 = [[one, zero], [zero, one]];
    let h: Mat2 = [
        [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)],
        [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)],
    ];
    let s_gate: Mat2 = [[one, zero], [zero, Complex64::new(0.0, 1.0)]];

    // Breadth-first closure of <H, S> modulo global phase.
    let mut mats = vec![canonicalize(&identity)];
    let mut index: HashMap<[i64; 8], usize> = HashMap::new();
    index.insert(matrix_key(&mats[0]), 0);
    let mut head = 0;
    while head < mats.len() {
        let current = mats[head];
        head += 1;
        for gen in [&h, &s_gate] {
            let prod = canonicalize(&mat_mul(gen, &current));
            let key = matrix_key(&prod);
            if !index.contains_key(&key) {
                index.insert(key, mats.len());
                mats.push(prod);
            }
        }
    }
    assert_eq!(
        mats.len(),
        CLIFFORD_COUNT,
        "Clifford closure produced an unexpected group order"
    );

    let angles = mats.iter().map(zyz_angles).collect();

    let mut mul = vec![[0usize; CLIFFORD_COUNT]; CLIFFORD_COUNT];
    for (a, ma) in mats.iter().enumerate() {
        for (b, mb) in mats.iter().enumerate() {
            let prod = canonicalize(&mat_mul(ma, mb));
            mul[a][b] = *index
                .get(&matrix_key(&prod))
                .expect("Clifford group is closed under multiplication");
        }
    }

    let mut inv = vec![0usize; CLIFFORD_COUNT];
    for (a, entry) in inv.iter_mut().enumerate() {
        *entry = (0..CLIFFORD_COUNT)
            .find(|&b| mul[b][a] == 0)
            .expect("every Clifford element has an inverse");
    }

    CliffordTable { mats, angles, mul, inv }
}

fn clifford_table() -> &'static CliffordTable {
    static TABLE: OnceLock<CliffordTable> = OnceLock::new();
    TABLE.get_or_init(build_clifford_table)
}

// ---------------------------------------------------------------------------
// Decay fit
// ---------------------------------------------------------------------------

/// Nonlinear least-squares fit of `p(L) = A·γ^L + B` by damped Gauss-Newton,
/// initialized from a log-linear regression with `B` pinned at 1/2.
fn fit_decay(lengths: &[f64], y: &[f64]) -> Option<RbFit> {
    let b0 = 0.5;
    let mut pts = Vec::new();
    for (&l, &v) in lengths.iter().zip(y) {
        if v - b0 > 1e-6 {
            pts.push((l, (v - b0).ln()));
        }
    }
    let (mut a, mut g) = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mean_l = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_z = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let var: f64 = pts.iter().map(|p| (p.0 - mean_l).powi(2)).sum();
        if var > 0.0 {
            let cov: f64 = pts
                .iter()
                .map(|p| (p.0 - mean_l) * (p.1 - mean_z))
                .sum();
            let slope = cov / var;
            let intercept = mean_z - slope * mean_l;
            (intercept.exp(), slope.exp().clamp(1e-6, 1.0))
        } else {
            (0.5, 0.9)
        }
    } else {
        (0.5, 0.9)
    };
    let mut b = b0;
    if !a.is_finite() || !g.is_finite() {
        a = 0.5;
        g = 0.9;
    }

    let cost_of = |a: f64, b: f64, g: f64| -> f64 {
        lengths
            .iter()
            .zip(y)
            .map(|(&l, &v)| {
                let r = a * g.powf(l) + b - v;
                r * r
            })
            .sum()
    };

    let mut cost = cost_of(a, b, g);
    if !cost.is_finite() {
        return None;
    }
    let mut lambda = 1e-3;
    for _ in 0..200 {
        if cost < 1e-30 {
            break;
        }
        // Accumulate J^T J and J^T r for the residuals r_i = A γ^L + B - y_i
        // with Jacobian rows [γ^L, 1, A·L·γ^{L-1}].
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (&l, &v) in lengths.iter().zip(y) {
            let gl = g.powf(l);
            let row = Vector3::new(gl, 1.0, if l > 0.0 { a * l * g.powf(l - 1.0) } else { 0.0 });
            let r = a * gl + b - v;
            jtj += row * row.transpose();
            jtr += row * r;
        }
        if !jtj.iter().all(|x| x.is_finite()) || !jtr.iter().all(|x| x.is_finite()) {
            return None;
        }

        let mut stepped = false;
        for _ in 0..40 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(delta) = damped.lu().solve(&(-jtr)) else {
                lambda *= 3.0;
                continue;
            };
            let na = a + delta[0];
            let nb = b + delta[1];
            let ng = (g + delta[2]).clamp(1e-9, 1.0);
            let nc = cost_of(na, nb, ng);
            if nc.is_finite() && nc < cost {
                let small = delta.amax() < 1e-12;
                a = na;
                b = nb;
                g = ng;
                cost = nc;
                lambda = (lambda / 3.0).max(1e-12);
                stepped = true;
                if small {
                    stepped = false; // converged
                }
                break;
            }
            lambda *= 3.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !stepped {
            break;
        }
    }

    if a.is_finite() && b.is_finite() && g.is_finite() {
        Some(RbFit { a, b, gamma: g.clamp(0.0, 1.0) })
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

/// Survival frequency of one random sequence of `length` Cliffords plus the
/// compiled group inverse.
fn sequence_survival(
    length: usize,
    seq_seed: u64,
    shots: u64,
    noise: Option<&NoiseModel>,
) -> Result<f64, BenchError> {
    let table = clifford_table();
    let mut rng = stream_rng(derive_seed(seq_seed, &[0]), 0);
    let mut circuit = Circuit::new(1, 1);
    let mut acc = 0usize;
    for _ in 0..length {
        let g = rand::Rng::random_range(&mut rng, 0..CLIFFORD_COUNT);
        let (theta, phi, lambda) = table.angles[g];
        circuit.u(0, theta, phi, lambda);
        acc = table.mul[g][acc];
    }
    let (theta, phi, lambda) = table.angles[table.inv[acc]];
    circuit.u(0, theta, phi, lambda);
    circuit.measure(0, 0);
    let hist = sim::sample(&circuit, shots, derive_seed(seq_seed, &[1]), noise)?;
    Ok(hist.frequency("0"))
}

/// Run a single-qubit randomized-benchmarking experiment.
///
/// For every requested sequence length, `n_seq` independent random Clifford
/// sequences are generated, each closed by its exact group inverse and
/// sampled with `shots` shots. The per-length mean survival of the all-zeros
/// outcome is fitted to `p(L) = A·γ^L + B`.
///
/// Results are deterministic for a given `seed`, independent of thread
/// count: every sequence derives its own RNG streams from
/// `(seed, length, sequence index)`.
pub fn rb_experiment(
    lengths: &[usize],
    n_seq: usize,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<RbResult, BenchError> {
    if lengths.len() < 2 {
        return Err(BenchError::Param(
            "randomized benchmarking needs at least two sequence lengths".into(),
        ));
    }
    if lengths.contains(&0) {
        return Err(BenchError::Param("sequence lengths must be at least 1".into()));
    }
    if n_seq == 0 {
        return Err(BenchError::Param("n_seq must be at least 1".into()));
    }
    if shots == 0 {
        return Err(BenchError::Param("shots must be at least 1".into()));
    }

    let jobs: Vec<(usize, usize, usize)> = lengths
        .iter()
        .enumerate()
        .flat_map(|(li, &l)| (0..n_seq).map(move |s| (li, l, s)))
        .collect();
    let survivals: Vec<(usize, f64)> = jobs
        .par_iter()
        .map(|&(li, l, s)| {
            let seq_seed = derive_seed(seed, &[l as u64, s as u64]);
            sequence_survival(l, seq_seed, shots, noise).map(|f| (li, f))
        })
        .collect::<Result<_, _>>()?;

    let mut survival = vec![0.0; lengths.len()];
    for (li, f) in survivals {
        survival[li] += f / n_seq as f64;
    }

    let length_f: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let fit = fit_decay(&length_f, &survival).ok_or_else(|| BenchError::FitFailure {
        lengths: lengths.to_vec(),
        survival: survival.clone(),
    })?;
    let avg_gate_fidelity = 0.5 + 0.5 * fit.gamma;
    Ok(RbResult { lengths: lengths.to_vec(), survival, fit, avg_gate_fidelity })
}
