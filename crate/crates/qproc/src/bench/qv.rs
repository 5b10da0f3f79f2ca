//! Quantum-volume estimation.
//!
//! Model circuits on `n` qubits consist of `n` layers; each layer applies a
//! Haar-random SU(4) block to consecutive pairs of a fresh random qubit
//! permutation (one qubit idles when `n` is odd). The heavy-output set of a
//! circuit contains the basis states whose ideal probability lies strictly
//! above the median. A width passes when the lower one-sigma bound on the
//! measured heavy-output fraction exceeds 2/3, and the quantum volume is
//! `2^n` for the largest `n` reached by consecutive passes starting at 2.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::haar_special_unitary;
use crate::noise::{apply_channel_stochastic, KrausSet, NoiseModel};
use crate::qasm::GateKind;
use crate::rng::{derive_seed, stream_rng};
use crate::sim::{Mat4, StateVector};

use super::{h_est, heavy_set, BenchError};

/// Largest supported model-circuit width (state vectors grow as `2^n`).
const MAX_WIDTH: usize = 20;

/// Measured outcome for one circuit width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QvRecord {
    /// Circuit width and depth.
    pub n: usize,
    /// Number of random model circuits.
    pub n_c: usize,
    /// Shots per circuit.
    pub n_s: u64,
    /// Total heavy-output counts over all circuits and shots.
    pub n_h: u64,
    /// Deviation-corrected heavy-output fraction estimate.
    pub h_est: f64,
    /// Whether `h_est` clears the 2/3 threshold.
    pub passed: bool,
}

/// Outcome of a quantum-volume experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QvResult {
    /// One record per width, `n = 2..=n_max` in order.
    pub records: Vec<QvRecord>,
    /// `2^n` for the largest consecutively passing width, or 1 if width 2
    /// already fails.
    pub quantum_volume: u64,
}

impl QvResult {
    /// Render the per-width records as a CSV table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,n_c,n_s,n_h,h_est,passed\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.n_c, r.n_s, r.n_h, r.h_est, r.passed
            ));
        }
        out
    }

    /// Serialize the full result as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("QvResult serialization cannot fail")
    }
}

/// One layer: SU(4) blocks on disjoint qubit pairs.
type Layer = Vec<(usize, usize, Mat4)>;

fn model_circuit<R: Rng>(n: usize, rng: &mut R) -> Vec<Layer> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut layers = Vec::with_capacity(n);
    for _ in 0..n {
        perm.shuffle(rng);
        let mut layer = Vec::with_capacity(n / 2);
        for pair in perm.chunks_exact(2) {
            let u = haar_special_unitary(4, rng);
            let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (r, row) in m.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate() {
                    *entry = u[(r, c)];
                }
            }
            layer.push((pair[0], pair[1], m));
        }
        layers.push(layer);
    }
    layers
}

fn ideal_probabilities(n: usize, layers: &[Layer]) -> Result<Vec<f64>, BenchError> {
    let mut sv = StateVector::new(n)?;
    for layer in layers {
        for (qa, qb, m) in layer {
            sv.apply_2q(*qa, *qb, m);
        }
    }
    Ok(sv.probabilities())
}

/// Count heavy outcomes over `n_s` shots of one model circuit.
///
/// Noiseless shots draw directly from the ideal distribution. Noisy shots
/// replay the circuit as a stochastic trajectory: preparation flips on every
/// qubit, the `cx`-keyed Kraus channel after each SU(4) block (a
/// two-qubit channel acts once on the pair, a one-qubit channel acts on each
/// qubit of the pair), then a projective measurement with readout flips.
fn heavy_counts<R: Rng>(
    n: usize,
    layers: &[Layer],
    ideal: &[f64],
    heavy_mask: &[bool],
    n_s: u64,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> Result<u64, BenchError> {
    let mut n_h = 0u64;
    match noise {
        None => {
            for _ in 0..n_s {
                let draw: f64 = rng.random();
                let mut acc = 0.0;
                let mut outcome = ideal.len() - 1;
                for (i, p) in ideal.iter().enumerate() {
                    acc += p;
                    if draw < acc {
                        outcome = i;
                        break;
                    }
                }
                if heavy_mask[outcome] {
                    n_h += 1;
                }
            }
        }
        Some(model) => {
            let prep = model.spam_prep();
            let readout = model.spam_readout();
            let channel = model.gate_channel(GateKind::CX);
            for _ in 0..n_s {
                let mut sv = StateVector::new(n)?;
                for q in 0..n {
                    if prep > 0.0 && rng.random::<f64>() < prep {
                        sv.apply_x(q);
                    }
                }
                for layer in layers {
                    for (qa, qb, m) in layer {
                        sv.apply_2q(*qa, *qb, m);
                        match channel {
                            Some(k @ KrausSet::Pair(_)) => {
                                apply_channel_stochastic(&mut sv, k, &[*qa, *qb], rng)?;
                            }
                            Some(k @ KrausSet::Single(_)) => {
                                apply_channel_stochastic(&mut sv, k, &[*qa], rng)?;
                                apply_channel_stochastic(&mut sv, k, &[*qb], rng)?;
                            }
                            None => {}
                        }
                    }
                }
                let mut outcome = 0usize;
                for q in 0..n {
                    let mut bit = sv.measure(q, rng)?;
                    if readout > 0.0 && rng.random::<f64>() < readout {
                        bit ^= 1;
                    }
                    outcome |= (bit as usize) << q;
                }
                if heavy_mask[outcome] {
                    n_h += 1;
                }
            }
        }
    }
    Ok(n_h)
}

/// Run a quantum-volume experiment over widths `2..=n_max`.
///
/// Every width is measured with `n_c` random model circuits and `n_s` shots
/// per circuit, whether or not smaller widths passed. Results are
/// deterministic for a given `seed` and independent of thread count: circuit
/// `c` at width `n` derives its own RNG streams from `(seed, n, c)`.
pub fn qv_experiment(
    n_max: usize,
    n_c: usize,
    n_s: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<QvResult, BenchError> {
    if !(2..=MAX_WIDTH).contains(&n_max) {
        return Err(BenchError::Param(format!(
            "n_max must be between 2 and {MAX_WIDTH}, got {n_max}"
        )));
    }
    if n_c == 0 {
        return Err(BenchError::Param("n_c must be at least 1".into()));
    }
    if n_s == 0 {
        return Err(BenchError::Param("n_s must be at least 1".into()));
    }

    let mut records = Vec::with_capacity(n_max - 1);
    for n in 2..=n_max {
        let counts: Vec<u64> = (0..n_c)
            .into_par_iter()
            .map(|c| {
                let circuit_seed = derive_seed(seed, &[n as u64, c as u64]);
                let mut gen_rng = stream_rng(circuit_seed, 0);
                let layers = model_circuit(n, &mut gen_rng);
                let ideal = ideal_probabilities(n, &layers)?;
                let mut heavy_mask = vec![false; ideal.len()];
                for i in heavy_set(&ideal) {
                    heavy_mask[i] = true;
                }
                let mut shot_rng = stream_rng(circuit_seed, 1);
                heavy_counts(n, &layers, &ideal, &heavy_mask, n_s, noise, &mut shot_rng)
            })
            .collect::<Result<_, _>>()?;
        let n_h: u64 = counts.iter().sum();
        let h = h_est(n_h, n_c as u64, n_s)?;
        records.push(QvRecord { n, n_c, n_s, n_h, h_est: h, passed: h > 2.0 / 3.0 });
    }

    let quantum_volume = volume_from_records(&records);
    Ok(QvResult { records, quantum_volume })
}

/// `2^n` for the largest width reached by consecutive passes starting at
/// `n = 2`; 1 when the first width already fails.
fn volume_from_records(records: &[QvRecord]) -> u64 {
    let mut top = 0usize;
    for r in records {
        if r.passed && r.n == top.max(1) + 1 {
            top = r.n;
        } else {
            break;
        }
    }
    if top == 0 {
        1
    } else {
        1u64 << top
    }
}
