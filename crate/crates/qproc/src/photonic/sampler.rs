//! Exact boson sampling with the Clifford-Clifford algorithm.
//!
//! For an `m`-mode interferometer `U` and `n` input photons, each sample is
//! drawn from the exact output distribution in O(n 2^n) time: output modes
//! are chosen one photon at a time, and the conditional weights at stage `k`
//! need `k` leave-one-column-out permanents of a `(k-1) x k` submatrix, all
//! of which are accumulated jointly in a single Gray-code sweep.

use super::permanent::permanent;
use super::PhotonicError;
use crate::linalg::{self, CMat, ComplexJson};
use crate::rng::stream_rng;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Photon-count guard for [`bs_sample`]: per-sample cost grows as O(n 2^n).
pub const MAX_SAMPLER_PHOTONS: u32 = 20;

/// An `m`-mode linear interferometer, validated unitary on construction.
/// Entry `U[i t j]` is the single-photon amplitude from input mode `j` to
/// output mode `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    u: CMat,
}

/// JSON shape of an interferometer: `{"unitary": [[{"re":..,"im":..},..],..]}`.
#[derive(Serialize, Deserialize)]
struct InterferometerJson {
    unitary: Vec<Vec<ComplexJson>>,
}

impl Interferometer {
    /// Wraps a matrix, rejecting anything not unitary within 1e-8.
    pub fn new(u: CMat) -> Result<Interferometer, PhotonicError> {
        if u.nrows() == 0 || !linalg::is_unitary(&u, 1e-8) {
            return Err(PhotonicError::NotUnitary);
        }
        Ok(Interferometer { u })
    }

    pub fn n_modes(&self) -> usize {
        self.u.nrows()
    }

    pub fn unitary(&self) -> &CMat {
        &self.u
    }

    /// Haar-random `m`-mode interferometer.
    pub fn random(m: usize, seed: u64) -> Interferometer {
        let mut rng = stream_rng(seed, 0);
        Interferometer {
            u: linalg::haar_unitary(m, &mut rng),
        }
    }

    /// Discrete-Fourier interferometer: `U_jk = exp(2 pi i j k / m) / sqrt(m)`.
    pub fn fourier(m: usize) -> Interferometer {
        let norm = 1.0 / (m as f64).sqrt();
        let u = CMat::from_fn(m, m, |j, k| {
            Complex64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64)
        });
        Interferometer { u }
    }

    pub fn from_json(text: &str) -> Result<Interferometer, PhotonicError> {
        let parsed: InterferometerJson = serde_json::from_str(text)
            .map_err(|e| PhotonicError::Param(format!("interferometer JSON: {e}")))?;
        let u = linalg::matrix_from_json(&parsed.unitary).ok_or_else(|| {
            PhotonicError::Param("interferometer matrix is empty or ragged".into())
        })?;
        Interferometer::new(u)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InterferometerJson {
            unitary: linalg::matrix_to_json(&self.u),
        })
        .expect("interferometer serializes")
    }
}

/// Imperfections applied around the ideal sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct BsNoise {
    /// Per-input-mode photon loss probability (length = number of modes).
    pub loss: Vec<f64>,
    /// Photon indistinguishability: each photon is flagged distinguishable
    /// with probability `1 - eta` per sample; distinguishable photons are
    /// routed independently by single-photon probabilities `|U_ij|^2`, while
    /// the indistinguishable set is sampled jointly.
    pub eta: f64,
    /// Per-output-mode dark-count probability (at most one extra count per
    /// detector per sample).
    pub dark_prob: f64,
}

impl BsNoise {
    pub fn new(loss: Vec<f64>, eta: f64, dark_prob: f64) -> Result<BsNoise, PhotonicError> {
        for (j, &r) in loss.iter().enumerate() {
            if !(0.0..=1.0).contains(&r) {
                return Err(PhotonicError::Param(format!(
                    "loss[{j}] must lie in [0,1], got {r}"
                )));
            }
        }
        for (name, v) in [("eta", eta), ("dark_prob", dark_prob)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(PhotonicError::Param(format!(
                    "{name} must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(BsNoise {
            loss,
            eta,
            dark_prob,
        })
    }

    /// Same loss on every mode.
    pub fn uniform(m: usize, loss: f64, eta: f64, dark_prob: f64) -> Result<BsNoise, PhotonicError> {
        BsNoise::new(vec![loss; m], eta, dark_prob)
    }
}

/// Renders an occupation vector as a compact string: digits concatenated
/// (`"12001"`), falling back to comma-separated when any count exceeds 9.
pub fn occupation_to_string(occ: &[u32]) -> String {
    if occ.iter().all(|&n| n <= 9) {
        occ.iter().map(|n| char::from(b'0' + *n as u8)).collect()
    } else {
        occ.iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Exact probability of observing `output` when `input` is fed into `interf`:
/// `|Per(A_{S,T})|^2 / (prod s_i! prod t_j!)`, where `A_{S,T}` repeats rows
/// by output multiplicity and columns by input multiplicity.
///
/// Input and output total photon numbers must match; this is the brute-force
/// oracle the sampler is validated against.
pub fn bs_probability(
    interf: &Interferometer,
    input: &[u32],
    output: &[u32],
) -> Result<f64, PhotonicError> {
    let m = interf.n_modes();
    if input.len() != m || output.len() != m {
        return Err(PhotonicError::Param(format!(
            "input/output must list all {m} modes"
        )));
    }
    let n_in: u32 = input.iter().sum();
    let n_out: u32 = output.iter().sum();
    if n_in != n_out {
        return Err(PhotonicError::PhotonMismatch {
            input: n_in,
            output: n_out,
        });
    }
    let n = n_in as usize;
    if n == 0 {
        return Ok(1.0);
    }
    let cols: Vec<usize> = expand_modes(input);
    let rows: Vec<usize> = expand_modes(output);
    let a = CMat::from_fn(n, n, |i, j| interf.u[(rows[i], cols[j])]);
    let per = permanent(&a)?;
    let denom: f64 = input.iter().map(|&t| factorial(t)).product::<f64>()
        * output.iter().map(|&s| factorial(s)).product::<f64>();
    Ok(per.norm_sqr() / denom)
}

/// Expands an occupation vector into a mode-index list with multiplicity.
fn expand_modes(occ: &[u32]) -> Vec<usize> {
    let mut out = Vec::new();
    for (mode, &count) in occ.iter().enumerate() {
        for _ in 0..count {
            out.push(mode);
        }
    }
    out
}

/// Draws `n_samples` outcomes of the boson-sampling experiment defined by
/// `interf` and `input`, in sample-index order. Deterministic in
/// `(interf, input, n_samples, seed, noise)` regardless of thread count.
pub fn bs_sample(
    interf: &Interferometer,
    input: &[u32],
    n_samples: u64,
    seed: u64,
    noise: Option<&BsNoise>,
) -> Result<Vec<String>, PhotonicError> {
    let m = interf.n_modes();
    if input.len() != m {
        return Err(PhotonicError::Param(format!(
            "input must list all {m} modes"
        )));
    }
    let n: u32 = input.iter().sum();
    if n > MAX_SAMPLER_PHOTONS {
        return Err(PhotonicError::Param(format!(
            "{n} photons exceed the sampler guard of {MAX_SAMPLER_PHOTONS}"
        )));
    }
    if let Some(bn) = noise {
        if bn.loss.len() != m {
            return Err(PhotonicError::Param(format!(
                "noise.loss must list all {m} modes, got {}",
                bn.loss.len()
            )));
        }
    }
    let photons = expand_modes(input);
    (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s);
            one_sample(interf, &photons, noise, &mut rng)
        })
        .collect()
}

fn one_sample<R: Rng>(
    interf: &Interferometer,
    photons: &[usize],
    noise: Option<&BsNoise>,
    rng: &mut R,
) -> Result<String, PhotonicError> {
    let m = interf.n_modes();
    let mut occ = vec![0u32; m];

    let mut joint_cols: Vec<usize> = Vec::with_capacity(photons.len());
    for &j in photons {
        if let Some(bn) = noise {
            if bn.loss[j] > 0.0 && rng.random::<f64>() < bn.loss[j] {
                continue; // photon lost at the input
            }
            if bn.eta < 1.0 && rng.random::<f64>() >= bn.eta {
                // Distinguishable photon: classical routing by |U_ij|^2.
                occ[route_single(interf, j, rng)] += 1;
                continue;
            }
        }
        joint_cols.push(j);
    }

    for row in clifford_clifford(&interf.u, &joint_cols, rng)? {
        occ[row] += 1;
    }

    if let Some(bn) = noise {
        if bn.dark_prob > 0.0 {
            for slot in occ.iter_mut() {
                if rng.random::<f64>() < bn.dark_prob {
                    *slot += 1;
                }
            }
        }
    }
    Ok(occupation_to_string(&occ))
}

fn route_single<R: Rng>(interf: &Interferometer, col: usize, rng: &mut R) -> usize {
    let m = interf.n_modes();
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for i in 0..m {
        cum += interf.u[(i, col)].norm_sqr();
        if u < cum {
            return i;
        }
    }
    m - 1
}

/// Core Clifford-Clifford draw: returns the output mode of each photon in
/// `cols` (the input-mode list with multiplicity), sampled jointly from the
/// exact `n`-photon distribution.
fn clifford_clifford<R: Rng>(
    u: &CMat,
    cols: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>, PhotonicError> {
    let n = cols.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = u.nrows();

    // Step 2 of the algorithm: a fresh uniform column permutation per sample
    // makes the sequential factorization below exact.
    let mut perm: Vec<usize> = cols.to_vec();
    perm.shuffle(rng);

    let mut rows: Vec<usize> = Vec::with_capacity(n);

    // Stage 1: single-photon weights from the first column.
    let w: Vec<f64> = (0..m).map(|i| u[(i, perm[0])].norm_sqr()).collect();
    rows.push(sample_index(&w, rng)?);

    // Stage k: weights w_i = |sum_l A_{il} Per_l|^2, with Per_l the permanent
    // of the chosen-rows submatrix missing column l. All k permanents are
    // accumulated in one Gray-code sweep over subsets of the k-1 chosen rows.
    for k in 2..=n {
        let col_ids = &perm[..k];
        let pers = leave_one_out_permanents(u, &rows, col_ids);
        let w: Vec<f64> = (0..m)
            .map(|i| {
                let amp: Complex64 = (0..k)
                    .map(|l| u[(i, col_ids[l])] * pers[l])
                    .sum();
                amp.norm_sqr()
            })
            .collect();
        rows.push(sample_index(&w, rng)?);
    }
    Ok(rows)
}

/// For the `(k-1) x k` matrix `U[rows, col_ids]`, computes all `k` permanents
/// of the square submatrices obtained by deleting one column, via a single
/// Gray-code subset sweep with prefix/suffix products (O(k 2^{k-1}) total).
fn leave_one_out_permanents(u: &CMat, rows: &[usize], col_ids: &[usize]) -> Vec<Complex64> {
    let k = col_ids.len();
    debug_assert_eq!(rows.len() + 1, k);
    if k == 1 {
        // Permanent of the empty matrix.
        return vec![Complex64::ONE];
    }
    let r = rows.len(); // = k - 1
    let mut col_sums = vec![Complex64::ZERO; k];
    let mut acc = vec![Complex64::ZERO; k];
    let mut prefix = vec![Complex64::ONE; k + 1];
    let mut suffix = vec![Complex64::ONE; k + 1];
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << r) {
        let next_gray = step ^ (step >> 1);
        let flipped = (gray ^ next_gray).trailing_zeros() as usize;
        let row = rows[flipped];
        if next_gray & (1 << flipped) != 0 {
            for (j, s) in col_sums.iter_mut().enumerate() {
                *s += u[(row, col_ids[j])];
            }
        } else {
            for (j, s) in col_sums.iter_mut().enumerate() {
                *s -= u[(row, col_ids[j])];
            }
        }
        gray = next_gray;
        let positive = gray.count_ones() % 2 == r as u32 % 2;
        for j in 0..k {
            prefix[j + 1] = prefix[j] * col_sums[j];
        }
        for j in (0..k).rev() {
            suffix[j] = suffix[j + 1] * col_sums[j];
        }
        for l in 0..k {
            let prod = prefix[l] * suffix[l + 1];
            if positive {
                acc[l] += prod;
            } else {
                acc[l] -= prod;
            }
        }
    }
    // The Ryser signs (-1)^{k-1} (-1)^{|S|} are folded into `positive`:
    // the term is positive exactly when |S| has the same parity as k-1.
    acc
}

fn sample_index<R: Rng>(weights: &[f64], rng: &mut R) -> Result<usize, PhotonicError> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(PhotonicError::Param(
            "sampler weights degenerate (all zero or non-finite)".into(),
        ));
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut cum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        cum += w;
        if u < cum {
            return Ok(i);
        }
    }
    Ok(weights.len() - 1)
}
