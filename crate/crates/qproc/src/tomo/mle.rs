//! Linear-inversion initialization and maximum-likelihood refinement.
//!
//! Every reconstructed object is kept in root-parameterized form
//! `X = cc†` with `c` of caller-chosen width (the rank hyperparameter).
//! Gradient ascent on the log-likelihood `L = Σ k·ln p` runs with a
//! backtracking line search, and the appropriate constraint set (unit
//! trace, trace preservation, or POVM completeness) is restored by
//! projection after every trial step, so accepted iterates are always
//! feasible and the likelihood trace is non-decreasing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{dagger, CMat};

use super::design::{prep_density, setting_effects};
use super::{TomoDataset, TomoError};

/// Probabilities are floored at this value inside logarithms.
const PROB_FLOOR: f64 = 1e-12;
/// Feasibility tolerance for the alternating Choi projection.
const PROJ_TOL: f64 = 1e-11;
/// Width limits keeping dense design matrices tractable.
const MAX_QST_QUBITS: usize = 4;
const MAX_QPT_QUBITS: usize = 2;
const MAX_QDT_QUBITS: usize = 2;

/// Stopping parameters for the likelihood optimizer.
#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    /// Maximum number of accepted gradient steps.
    pub max_iters: usize,
    /// Stop when the relative log-likelihood change drops below this.
    pub rel_tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions { max_iters: 5000, rel_tol: 1e-10 }
    }
}

/// Optimizer diagnostics attached to every estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleReport {
    /// Log-likelihood of the initial point and of each accepted step.
    pub log_likelihood: Vec<f64>,
    /// Number of accepted gradient steps.
    pub iterations: usize,
    /// False only when the iteration limit was hit before the relative
    /// tolerance; the estimate then holds the last iterate.
    pub converged: bool,
}

/// Reconstructed density matrix with diagnostics.
#[derive(Debug, Clone)]
pub struct StateEstimate {
    pub rho: CMat,
    pub report: MleReport,
}

/// Reconstructed process matrix (matrix-unit basis) with diagnostics.
#[derive(Debug, Clone)]
pub struct ProcessEstimate {
    pub choi: CMat,
    pub report: MleReport,
}

/// Reconstructed POVM with diagnostics.
#[derive(Debug, Clone)]
pub struct DetectorEstimate {
    pub effects: Vec<CMat>,
    pub report: MleReport,
}

// ---------------------------------------------------------------------------
// Hermitian linear algebra helpers
// ---------------------------------------------------------------------------

pub(super) fn hermitize(m: &CMat) -> CMat {
    (m + dagger(m)).map(|z| z * 0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub(super) fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Root factor of width `rank` from the top eigenpairs, negatives clipped.
fn root_factor(m: &CMat, rank: usize) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    CMat::from_fn(m.nrows(), rank, |r, j| {
        vecs[(r, j)] * Complex64::new(vals[j].max(0.0).sqrt(), 0.0)
    })
}

fn assemble(c: &CMat) -> CMat {
    c * c.adjoint()
}

/// `Tr_A` over the first (row-index) tensor factor of a `d²×d²` matrix.
fn partial_trace_first(chi: &CMat, d: usize) -> CMat {
    CMat::from_fn(d, d, |j, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            acc += chi[(i * d + j, i * d + l)];
        }
        acc
    })
}

// ---------------------------------------------------------------------------
// Constraint projections (each returns a fresh root factor)
// ---------------------------------------------------------------------------

fn project_state(x: &CMat, rank: usize) -> CMat {
    let d = x.nrows();
    let (vals, vecs) = hermitian_eigen(x);
    let mut lams: Vec<f64> = vals.iter().take(rank).map(|&v| v.max(0.0)).collect();
    let total: f64 = lams.iter().sum();
    if total <= 1e-300 {
        lams = vec![1.0 / rank as f64; rank];
    } else {
        for l in &mut lams {
            *l /= total;
        }
    }
    CMat::from_fn(d, rank, |r, j| vecs[(r, j)] * Complex64::new(lams[j].sqrt(), 0.0))
}

/// Alternating projections onto trace preservation (affine) and the PSD
/// cone capped at `rank` nonzero eigenvalues.
fn project_choi(x: &CMat, d: usize, rank: usize) -> CMat {
    let eye = CMat::identity(d, d);
    let mut cur = hermitize(x);
    let tr = cur.trace().re;
    if tr < 1e-12 {
        cur = CMat::identity(d * d, d * d).map(|z| z / d as f64);
    } else {
        // Trace preservation forces Tr(X) = d; rescaling first keeps the
        // alternating projections well-conditioned for far-away inputs.
        cur.scale_mut(d as f64 / tr);
    }
    let mut factor = root_factor(&cur, rank);
    for _ in 0..500 {
        let excess = partial_trace_first(&cur, d) - &eye;
        let tp_dev = excess.iter().map(|z| z.norm()).fold(0.0, f64::max);
        cur -= eye.kronecker(&excess).map(|z| z / d as f64);
        let (vals, vecs) = hermitian_eigen(&cur);
        let psd_dev = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < rank { (-v).max(0.0) } else { v.abs() })
            .fold(0.0, f64::max);
        factor = CMat::from_fn(cur.nrows(), rank, |r, j| {
            vecs[(r, j)] * Complex64::new(vals[j].max(0.0).sqrt(), 0.0)
        });
        cur = assemble(&factor);
        if tp_dev < PROJ_TOL && psd_dev < PROJ_TOL {
            break;
        }
    }
    factor
}

/// Clip each effect to the PSD cone at the given rank, then symmetrize with
/// `S^{-1/2}` so the effects sum exactly to the identity.
fn project_povm(xs: &[CMat], rank: usize) -> Vec<CMat> {
    let d = xs[0].nrows();
    let factors: Vec<CMat> = xs.iter().map(|x| root_factor(x, rank)).collect();
    let mut total = CMat::zeros(d, d);
    for f in &factors {
        total += assemble(f);
    }
    if total.trace().re < 1e-12 {
        let k = xs.len() as f64;
        return xs
            .iter()
            .map(|_| {
                CMat::from_fn(d, rank, |r, j| {
                    if r == j {
                        Complex64::new((1.0 / k).sqrt(), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
    }
    let (vals, vecs) = hermitian_eigen(&total);
    let inv_sqrt = CMat::from_fn(d, d, |r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..d {
            acc += vecs[(r, t)] * vecs[(c, t)].conj() / vals[t].max(1e-12).sqrt();
        }
        acc
    });
    factors.iter().map(|f| &inv_sqrt * f).collect()
}

// ---------------------------------------------------------------------------
// Reconstruction problems
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum ObjectKind {
    State,
    /// System dimension `d` of a `d²×d²` process matrix.
    Choi(usize),
    Povm,
}

struct MleRow {
    object: usize,
    /// Hermitian operator with `p = Re Tr(op · X)`.
    op: CMat,
    count: f64,
    /// Empirical frequency within the row's record.
    freq: f64,
}

struct MleProblem {
    /// Object dimension.
    dim: usize,
    n_objects: usize,
    rank: usize,
    kind: ObjectKind,
    rows: Vec<MleRow>,
}

impl MleProblem {
    fn project(&self, xs: &[CMat]) -> Vec<CMat> {
        match self.kind {
            ObjectKind::State => vec![project_state(&xs[0], self.rank)],
            ObjectKind::Choi(d) => vec![project_choi(&xs[0], d, self.rank)],
            ObjectKind::Povm => project_povm(xs, self.rank),
        }
    }

    fn log_likelihood(&self, objects: &[CMat]) -> f64 {
        let mut ll = 0.0;
        for row in &self.rows {
            if row.count > 0.0 {
                let p = trace_product(&row.op, &objects[row.object]).max(PROB_FLOOR);
                ll += row.count * p.ln();
            }
        }
        ll
    }

    fn gradients(&self, objects: &[CMat]) -> Vec<CMat> {
        let mut grads = vec![CMat::zeros(self.dim, self.dim); self.n_objects];
        for row in &self.rows {
            if row.count > 0.0 {
                let p = trace_product(&row.op, &objects[row.object]).max(PROB_FLOOR);
                grads[row.object] += row.op.map(|z| z * (row.count / p));
            }
        }
        grads
    }
}

/// `Re Tr(A·B)` for Hermitian `A`, `B`.
fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            acc += (a[(r, c)] * b[(c, r)]).re;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Linear inversion
// ---------------------------------------------------------------------------

/// Coordinates of a Hermitian matrix in the real basis
/// `{E_aa} ∪ {E_ab+E_ba, iE_ab-iE_ba : a<b}`; `design_coords` gives the row
/// of `Tr(F·B_t)` values so that `p = coords(F) · params(X)`.
fn design_coords(f: &CMat) -> Vec<f64> {
    let d = f.nrows();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        out.push(f[(a, a)].re);
    }
    for a in 0..d {
        for b in (a + 1)..d {
            out.push(2.0 * f[(a, b)].re);
            out.push(2.0 * f[(a, b)].im);
        }
    }
    out
}

fn matrix_from_params(params: &[f64], d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for a in 0..d {
        m[(a, a)] = Complex64::new(params[a], 0.0);
    }
    let mut t = d;
    for a in 0..d {
        for b in (a + 1)..d {
            let re = params[t];
            let im = params[t + 1];
            t += 2;
            m[(a, b)] = Complex64::new(re, im);
            m[(b, a)] = Complex64::new(re, -im);
        }
    }
    m
}

/// Least-squares inversion of the observed frequencies; also performs the
/// informational-completeness rank check.
fn linear_inversion(problem: &MleProblem) -> Result<Vec<CMat>, TomoError> {
    let p_per = problem.dim * problem.dim;
    let n_params = problem.n_objects * p_per;
    let n_rows = problem.rows.len();
    let mut design = DMatrix::<f64>::zeros(n_rows, n_params);
    let mut rhs = DVector::<f64>::zeros(n_rows);
    for (r, row) in problem.rows.iter().enumerate() {
        let coords = design_coords(&row.op);
        for (t, v) in coords.into_iter().enumerate() {
            design[(r, row.object * p_per + t)] = v;
        }
        rhs[r] = row.freq;
    }

    let svd = design.svd(true, true);
    let sv_max = svd.singular_values.max();
    let tol = sv_max.max(1.0) * 1e-9;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < n_params {
        return Err(TomoError::NotInformationallyComplete { rank, needed: n_params });
    }
    let solution = svd
        .solve(&rhs, tol)
        .map_err(|e| TomoError::Param(format!("linear inversion failed: {e}")))?;
    let params: Vec<f64> = solution.iter().copied().collect();
    Ok((0..problem.n_objects)
        .map(|k| matrix_from_params(&params[k * p_per..(k + 1) * p_per], problem.dim))
        .collect())
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

fn optimize(problem: &MleProblem, init: Vec<CMat>, opts: &MleOptions) -> (Vec<CMat>, MleReport) {
    let mut factors = problem.project(&init);
    let mut objects: Vec<CMat> = factors.iter().map(assemble).collect();
    let mut ll = problem.log_likelihood(&objects);
    let mut trace = vec![ll];

    let total_counts: f64 = problem.rows.iter().map(|r| r.count).sum();
    let mut eta = 1.0 / total_counts.max(1.0);
    let mut iterations = 0;
    let mut converged = true;

    for _ in 0..opts.max_iters {
        let grads = problem.gradients(&objects);
        let directions: Vec<CMat> = factors
            .iter()
            .enumerate()
            .map(|(k, c)| &grads[k] * c)
            .collect();

        let mut accepted = false;
        for _ in 0..50 {
            let trial_raw: Vec<CMat> = factors
                .iter()
                .zip(&directions)
                .map(|(c, g)| {
                    let stepped = c + g.map(|z| z * eta);
                    assemble(&stepped)
                })
                .collect();
            let trial_factors = problem.project(&trial_raw);
            let trial_objects: Vec<CMat> = trial_factors.iter().map(assemble).collect();
            let trial_ll = problem.log_likelihood(&trial_objects);
            if trial_ll.is_finite() && trial_ll > ll {
                let rel = (trial_ll - ll) / trial_ll.abs().max(1.0);
                factors = trial_factors;
                objects = trial_objects;
                ll = trial_ll;
                trace.push(ll);
                iterations += 1;
                eta *= 1.5;
                accepted = true;
                if rel < opts.rel_tol {
                    return (
                        objects,
                        MleReport { log_likelihood: trace, iterations, converged: true },
                    );
                }
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            // No ascent direction at any step size: a constrained maximum.
            return (
                objects,
                MleReport { log_likelihood: trace, iterations, converged: true },
            );
        }
        converged = false;
    }
    (objects, MleReport { log_likelihood: trace, iterations, converged })
}

// ---------------------------------------------------------------------------
// Dataset-to-problem assembly
// ---------------------------------------------------------------------------

fn outcome_key(i: usize, n: usize) -> String {
    (0..n)
        .rev()
        .map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn record_shots(
    counts: &std::collections::BTreeMap<String, u64>,
    idx: usize,
) -> Result<f64, TomoError> {
    let shots: u64 = counts.values().sum();
    if shots == 0 {
        return Err(TomoError::Dataset(format!("record {idx} has no counts")));
    }
    Ok(shots as f64)
}

fn qst_rows(data: &TomoDataset) -> Result<Vec<MleRow>, TomoError> {
    let n = data.n_qubits();
    let dim = 1usize << n;
    let mut rows = Vec::new();
    for (idx, rec) in data.records().iter().enumerate() {
        if rec.prep.is_some() {
            return Err(TomoError::Dataset(format!(
                "record {idx}: state tomography records must not carry preparations"
            )));
        }
        let setting = rec.setting.as_ref().ok_or_else(|| {
            TomoError::Dataset(format!("record {idx}: missing measurement setting"))
        })?;
        let effects = setting_effects(setting)?;
        let shots = record_shots(&rec.counts, idx)?;
        for (i, effect) in effects.into_iter().enumerate() {
            let count = *rec.counts.get(&outcome_key(i, n)).unwrap_or(&0) as f64;
            rows.push(MleRow { object: 0, op: effect, count, freq: count / shots });
        }
        debug_assert_eq!(rows.len() % dim, 0);
    }
    if rows.is_empty() {
        return Err(TomoError::Dataset("dataset has no records".into()));
    }
    Ok(rows)
}

/// Process-row operator: `p = Tr(F·χ)` in the matrix-unit basis with
/// `F[kd+l][id+j] = ρ[j][l]·E[k][i]`.
fn process_op(rho: &CMat, effect: &CMat) -> CMat {
    let d = rho.nrows();
    CMat::from_fn(d * d, d * d, |rn, cm| {
        let (k, l) = (rn / d, rn % d);
        let (i, j) = (cm / d, cm % d);
        rho[(j, l)] * effect[(k, i)]
    })
}

fn qpt_rows(data: &TomoDataset) -> Result<Vec<MleRow>, TomoError> {
    let n = data.n_qubits();
    let mut rows = Vec::new();
    for (idx, rec) in data.records().iter().enumerate() {
        let prep = rec.prep.as_ref().ok_or_else(|| {
            TomoError::Dataset(format!("record {idx}: missing preparation label"))
        })?;
        let setting = rec.setting.as_ref().ok_or_else(|| {
            TomoError::Dataset(format!("record {idx}: missing measurement setting"))
        })?;
        let rho = prep_density(prep)?;
        let effects = setting_effects(setting)?;
        let shots = record_shots(&rec.counts, idx)?;
        for (i, effect) in effects.into_iter().enumerate() {
            let count = *rec.counts.get(&outcome_key(i, n)).unwrap_or(&0) as f64;
            rows.push(MleRow {
                object: 0,
                op: process_op(&rho, &effect),
                count,
                freq: count / shots,
            });
        }
    }
    if rows.is_empty() {
        return Err(TomoError::Dataset("dataset has no records".into()));
    }
    Ok(rows)
}

fn qdt_rows(data: &TomoDataset) -> Result<Vec<MleRow>, TomoError> {
    let n = data.n_qubits();
    let dim = 1usize << n;
    let mut rows = Vec::new();
    for (idx, rec) in data.records().iter().enumerate() {
        if rec.setting.is_some() {
            return Err(TomoError::Dataset(format!(
                "record {idx}: detector tomography records must not carry settings"
            )));
        }
        let prep = rec.prep.as_ref().ok_or_else(|| {
            TomoError::Dataset(format!("record {idx}: missing preparation label"))
        })?;
        let rho = prep_density(prep)?;
        let shots = record_shots(&rec.counts, idx)?;
        for k in 0..dim {
            let count = *rec.counts.get(&outcome_key(k, n)).unwrap_or(&0) as f64;
            rows.push(MleRow { object: k, op: rho.clone(), count, freq: count / shots });
        }
    }
    if rows.is_empty() {
        return Err(TomoError::Dataset("dataset has no records".into()));
    }
    Ok(rows)
}

fn check_rank(rank: Option<usize>, dim: usize) -> Result<usize, TomoError> {
    let r = rank.unwrap_or(dim);
    if r == 0 || r > dim {
        return Err(TomoError::Param(format!(
            "rank must lie in 1..={dim}, got {r}"
        )));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Public reconstructions
// ---------------------------------------------------------------------------

/// Reconstruct a density matrix from Pauli-setting counts.
///
/// `rank` caps the number of nonzero eigenvalues of the estimate (default:
/// full rank). The result satisfies `ρ = ρ†`, `ρ ⪰ 0`, `Tr ρ = 1`.
pub fn qst_mle(
    data: &TomoDataset,
    rank: Option<usize>,
    opts: &MleOptions,
) -> Result<StateEstimate, TomoError> {
    let n = data.n_qubits();
    if n > MAX_QST_QUBITS {
        return Err(TomoError::Param(format!(
            "state tomography supports up to {MAX_QST_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let rank = check_rank(rank, dim)?;
    let problem =
        MleProblem { dim, n_objects: 1, rank, kind: ObjectKind::State, rows: qst_rows(data)? };
    let init = linear_inversion(&problem)?;
    let (mut objects, report) = optimize(&problem, init, opts);
    let mut rho = hermitize(&objects.remove(0));
    let tr = rho.trace().re;
    if tr > 0.0 {
        rho = rho.map(|z| z / tr);
    }
    Ok(StateEstimate { rho, report })
}

/// Reconstruct a process matrix (matrix-unit basis) from counts gathered
/// over the preparation/setting design.
///
/// The result is PSD with `Tr_A(χ) = I` (trace preservation) and `Tr χ = d`.
pub fn qpt_mle(
    data: &TomoDataset,
    rank: Option<usize>,
    opts: &MleOptions,
) -> Result<ProcessEstimate, TomoError> {
    let n = data.n_qubits();
    if n > MAX_QPT_QUBITS {
        return Err(TomoError::Param(format!(
            "process tomography supports up to {MAX_QPT_QUBITS} qubits, got {n}"
        )));
    }
    let d = 1usize << n;
    let dim = d * d;
    let rank = check_rank(rank, dim)?;
    let problem = MleProblem {
        dim,
        n_objects: 1,
        rank,
        kind: ObjectKind::Choi(d),
        rows: qpt_rows(data)?,
    };
    let init = linear_inversion(&problem)?;
    let (mut objects, report) = optimize(&problem, init, opts);
    let choi = hermitize(&objects.remove(0));
    Ok(ProcessEstimate { choi, report })
}

/// Reconstruct the POVM of a detector from counts over the preparation
/// design. One effect is returned per outcome bitstring, in index order;
/// they are PSD and sum to the identity.
pub fn qdt_mle(
    data: &TomoDataset,
    rank: Option<usize>,
    opts: &MleOptions,
) -> Result<DetectorEstimate, TomoError> {
    let n = data.n_qubits();
    if n > MAX_QDT_QUBITS {
        return Err(TomoError::Param(format!(
            "detector tomography supports up to {MAX_QDT_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let rank = check_rank(rank, dim)?;
    let problem = MleProblem {
        dim,
        n_objects: dim,
        rank,
        kind: ObjectKind::Povm,
        rows: qdt_rows(data)?,
    };
    let init = linear_inversion(&problem)?;
    let (objects, report) = optimize(&problem, init, opts);
    let effects = objects.iter().map(hermitize).collect();
    Ok(DetectorEstimate { effects, report })
}

// ---------------------------------------------------------------------------
// Fidelities
// ---------------------------------------------------------------------------

/// Overlap `⟨ψ|ρ|ψ⟩` of a density matrix with a pure target state.
pub fn fidelity_to_target(
    rho: &CMat,
    psi: &DVector<Complex64>,
) -> Result<f64, TomoError> {
    if rho.nrows() != rho.ncols() {
        return Err(TomoError::DimensionMismatch { expected: rho.nrows(), got: rho.ncols() });
    }
    if psi.len() != rho.nrows() {
        return Err(TomoError::DimensionMismatch { expected: rho.nrows(), got: psi.len() });
    }
    let norm = psi.norm_squared();
    if norm <= 0.0 {
        return Err(TomoError::Param("target state must be nonzero".into()));
    }
    let val = (psi.adjoint() * rho * psi)[(0, 0)].re / norm;
    Ok(val.clamp(0.0, 1.0))
}

/// Entanglement fidelity of a process matrix against a target unitary:
/// the overlap of the normalized Choi state with the target's Choi state,
/// `|⟨Φ|(U†⊗I)·|` form, which reduces to `vec(U)† χ vec(U) / (d·Tr χ)`.
pub fn entanglement_fidelity(chi: &CMat, u_targ: &CMat) -> Result<f64, TomoError> {
    let d = u_targ.nrows();
    if u_targ.ncols() != d {
        return Err(TomoError::DimensionMismatch { expected: d, got: u_targ.ncols() });
    }
    if chi.nrows() != d * d || chi.ncols() != d * d {
        return Err(TomoError::DimensionMismatch { expected: d * d, got: chi.nrows() });
    }
    let tr = chi.trace().re;
    if tr <= 0.0 {
        return Err(TomoError::Param("process matrix must have positive trace".into()));
    }
    let v = DVector::<Complex64>::from_fn(d * d, |m, _| u_targ[(m / d, m % d)]);
    let val = (v.adjoint() * chi * v)[(0, 0)].re / (d as f64 * tr);
    Ok(val.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, max_abs_diff};
    use crate::rng::stream_rng;
    use crate::tomo::design::{qpt_design, qst_design, PREP_LETTERS};
    use crate::tomo::TomoRecord;
    use rand::Rng;
    use std::collections::BTreeMap;

    fn counts_map(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Exact-probability counts (rounded at 1e12 shots) for a state.
    fn exact_qst_dataset(rho: &CMat, n: usize) -> TomoDataset {
        let mut records = Vec::new();
        for setting in qst_design(n).unwrap() {
            let effects = setting_effects(&setting).unwrap();
            let mut counts = BTreeMap::new();
            for (i, e) in effects.iter().enumerate() {
                let p = trace_product(e, rho).max(0.0);
                let c = (p * 1e12).round() as u64;
                if c > 0 {
                    counts.insert(outcome_key(i, n), c);
                }
            }
            records.push(TomoRecord { prep: None, setting: Some(setting), counts });
        }
        TomoDataset::new(n, records).unwrap()
    }

    /// Multinomially sampled counts for a state.
    fn sampled_qst_dataset(rho: &CMat, n: usize, shots: u64, seed: u64) -> TomoDataset {
        let mut rng = stream_rng(seed, 0);
        let mut records = Vec::new();
        for setting in qst_design(n).unwrap() {
            let effects = setting_effects(&setting).unwrap();
            let probs: Vec<f64> =
                effects.iter().map(|e| trace_product(e, rho).max(0.0)).collect();
            let mut counts: BTreeMap<String, u64> = BTreeMap::new();
            for _ in 0..shots {
                let draw: f64 = rng.random();
                let mut acc = 0.0;
                let mut outcome = probs.len() - 1;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if draw < acc {
                        outcome = i;
                        break;
                    }
                }
                *counts.entry(outcome_key(outcome, n)).or_insert(0) += 1;
            }
            records.push(TomoRecord { prep: None, setting: Some(setting), counts });
        }
        TomoDataset::new(n, records).unwrap()
    }

    /// Exact-probability QPT dataset for the channel `ρ -> UρU†`.
    fn exact_qpt_dataset(u: &CMat, n: usize) -> TomoDataset {
        let mut records = Vec::new();
        for (prep, setting) in qpt_design(n).unwrap() {
            let rho = prep_density(&prep).unwrap();
            let out = u * rho * dagger(u);
            let effects = setting_effects(&setting).unwrap();
            let mut counts = BTreeMap::new();
            for (i, e) in effects.iter().enumerate() {
                let p = trace_product(e, &out).max(0.0);
                let c = (p * 1e9).round() as u64;
                if c > 0 {
                    counts.insert(outcome_key(i, n), c);
                }
            }
            records.push(TomoRecord { prep: Some(prep), setting: Some(setting), counts });
        }
        TomoDataset::new(n, records).unwrap()
    }

    fn random_mixed_state(seed: u64) -> CMat {
        let mut rng = stream_rng(seed, 0);
        let u = haar_unitary(2, &mut rng);
        let mut rho = CMat::zeros(2, 2);
        let lams = [0.7, 0.3];
        for (k, &l) in lams.iter().enumerate() {
            let col = u.column(k);
            for r in 0..2 {
                for c in 0..2 {
                    rho[(r, c)] += col[r] * col[c].conj() * l;
                }
            }
        }
        rho
    }

    #[test]
    fn qst_exact_ground_state_is_recovered() {
        let n = 1_000_000u64;
        let records = vec![
            TomoRecord {
                prep: None,
                setting: Some("Z".into()),
                counts: counts_map(&[("0", n)]),
            },
            TomoRecord {
                prep: None,
                setting: Some("X".into()),
                counts: counts_map(&[("0", n / 2), ("1", n / 2)]),
            },
            TomoRecord {
                prep: None,
                setting: Some("Y".into()),
                counts: counts_map(&[("0", n / 2), ("1", n / 2)]),
            },
        ];
        let data = TomoDataset::new(1, records).unwrap();
        let est = qst_mle(&data, Some(1), &MleOptions::default()).unwrap();
        assert!(est.rho[(0, 0)].re > 0.999, "got {}", est.rho[(0, 0)].re);
        assert!((est.rho.trace().re - 1.0).abs() < 1e-9);
        assert!(est.report.converged);
    }

    #[test]
    fn linear_inversion_is_exact_for_interior_states() {
        // With exact frequencies the least-squares initializer already
        // equals the true state; zero optimizer steps keep it unchanged.
        for seed in [1, 2, 3, 4, 5] {
            let rho = random_mixed_state(seed);
            let data = exact_qst_dataset(&rho, 1);
            let opts = MleOptions { max_iters: 0, rel_tol: 1e-10 };
            let est = qst_mle(&data, None, &opts).unwrap();
            assert!(
                max_abs_diff(&est.rho, &rho) < 1e-5,
                "seed {seed}: deviation {}",
                max_abs_diff(&est.rho, &rho)
            );
        }
    }

    #[test]
    fn qst_likelihood_is_monotone_and_estimate_accurate() {
        let mut rng = stream_rng(42, 0);
        let u = haar_unitary(2, &mut rng);
        let psi = DVector::from_fn(2, |r, _| u[(r, 0)]);
        let rho_true = &psi * psi.adjoint();
        let data = sampled_qst_dataset(&rho_true, 1, 10_000, 7);
        let est = qst_mle(&data, Some(1), &MleOptions::default()).unwrap();
        for w in est.report.log_likelihood.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "log-likelihood decreased: {} -> {}", w[0], w[1]);
        }
        let f = fidelity_to_target(&est.rho, &psi).unwrap();
        assert!(f > 0.99, "fidelity {f}");
        // PSD invariant.
        let (vals, _) = hermitian_eigen(&est.rho);
        assert!(vals.iter().all(|&v| v > -1e-9));
    }

    #[test]
    fn qst_two_qubit_bell_state() {
        let mut bell = CMat::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(r, c)] = Complex64::new(0.5, 0.0);
        }
        let data = sampled_qst_dataset(&bell, 2, 4000, 11);
        let est = qst_mle(&data, Some(1), &MleOptions::default()).unwrap();
        let psi = DVector::from_fn(4, |r, _| {
            if r == 0 || r == 3 {
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let f = fidelity_to_target(&est.rho, &psi).unwrap();
        assert!(f > 0.98, "fidelity {f}");
    }

    #[test]
    fn qpt_identity_channel_from_exact_data() {
        let eye = CMat::identity(2, 2);
        let data = exact_qpt_dataset(&eye, 1);
        let est = qpt_mle(&data, None, &MleOptions::default()).unwrap();
        // Choi matrix of the identity: vec(I)vec(I)† with trace d.
        let f = entanglement_fidelity(&est.choi, &eye).unwrap();
        assert!(f > 0.9999, "fidelity {f}");
        let tp = partial_trace_first(&est.choi, 2) - CMat::identity(2, 2);
        assert!(tp.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-6);
        assert!((est.choi.trace().re - 2.0).abs() < 1e-6);
        let (vals, _) = hermitian_eigen(&est.choi);
        assert!(vals.iter().all(|&v| v > -1e-9));
        assert!((vals[0] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn qpt_rx_rotation_has_high_fidelity_and_distinguishes_targets() {
        let theta: f64 = std::f64::consts::PI / 3.0;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let rx = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(0.0, -s),
                Complex64::new(c, 0.0),
            ],
        );
        let data = exact_qpt_dataset(&rx, 1);
        let est = qpt_mle(&data, None, &MleOptions::default()).unwrap();
        let f = entanglement_fidelity(&est.choi, &rx).unwrap();
        assert!(f > 0.99, "fidelity to the true rotation {f}");
        let f_eye = entanglement_fidelity(&est.choi, &CMat::identity(2, 2)).unwrap();
        // cos²(θ/2) = 0.75: the identity must score distinctly lower.
        assert!((f_eye - 0.75).abs() < 0.01, "identity fidelity {f_eye}");
    }

    #[test]
    fn qdt_recovers_ideal_z_measurement() {
        let shots = 1_000_000u64;
        let mut records = Vec::new();
        for letter in PREP_LETTERS {
            let prep = letter.to_string();
            let rho = prep_density(&prep).unwrap();
            let p0 = rho[(0, 0)].re.clamp(0.0, 1.0);
            let c0 = (p0 * shots as f64).round() as u64;
            records.push(TomoRecord {
                prep: Some(prep),
                setting: None,
                counts: counts_map(&[("0", c0), ("1", shots - c0)]),
            });
        }
        let data = TomoDataset::new(1, records).unwrap();
        let est = qdt_mle(&data, None, &MleOptions::default()).unwrap();
        assert_eq!(est.effects.len(), 2);
        let mut e0_target = CMat::zeros(2, 2);
        e0_target[(0, 0)] = Complex64::new(1.0, 0.0);
        let mut e1_target = CMat::zeros(2, 2);
        e1_target[(1, 1)] = Complex64::new(1.0, 0.0);
        assert!(max_abs_diff(&est.effects[0], &e0_target) < 1e-3);
        assert!(max_abs_diff(&est.effects[1], &e1_target) < 1e-3);
        let sum = &est.effects[0] + &est.effects[1];
        assert!(max_abs_diff(&sum, &CMat::identity(2, 2)) < 1e-6);
    }

    #[test]
    fn incomplete_designs_are_rejected() {
        // Only X and Y settings: the Z component of the state is invisible.
        let records = vec![
            TomoRecord {
                prep: None,
                setting: Some("X".into()),
                counts: counts_map(&[("0", 10), ("1", 10)]),
            },
            TomoRecord {
                prep: None,
                setting: Some("Y".into()),
                counts: counts_map(&[("0", 10), ("1", 10)]),
            },
        ];
        let data = TomoDataset::new(1, records).unwrap();
        match qst_mle(&data, None, &MleOptions::default()) {
            Err(TomoError::NotInformationallyComplete { rank, needed }) => {
                assert_eq!(needed, 4);
                assert_eq!(rank, 3);
            }
            other => panic!("expected completeness error, got {other:?}"),
        }
    }

    #[test]
    fn shot_consistency_reduces_reconstruction_error() {
        // Median infidelity over random pure targets must shrink as shots
        // grow by decades.
        let mut medians = Vec::new();
        for (gen, shots) in [(0u64, 1_000u64), (1, 10_000), (2, 100_000)] {
            let mut errs = Vec::new();
            for t in 0..9 {
                let mut rng = stream_rng(100 + t, gen);
                let u = haar_unitary(2, &mut rng);
                let psi = DVector::from_fn(2, |r, _| u[(r, 0)]);
                let rho = &psi * psi.adjoint();
                let data = sampled_qst_dataset(&rho, 1, shots, 500 + 10 * t + gen);
                let est = qst_mle(&data, Some(1), &MleOptions::default()).unwrap();
                errs.push(1.0 - fidelity_to_target(&est.rho, &psi).unwrap());
            }
            errs.sort_by(f64::total_cmp);
            medians.push(errs[errs.len() / 2]);
        }
        assert!(
            medians[1] < medians[0] && medians[2] < medians[1],
            "medians not decreasing: {medians:?}"
        );
    }

    #[test]
    fn fidelity_helpers_match_hand_values() {
        let psi = DVector::from_fn(2, |r, _| {
            if r == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rho_pure = &psi * psi.adjoint();
        assert!((fidelity_to_target(&rho_pure, &psi).unwrap() - 1.0).abs() < 1e-12);
        let mixed = CMat::identity(2, 2).map(|z| z * 0.5);
        assert!((fidelity_to_target(&mixed, &psi).unwrap() - 0.5).abs() < 1e-12);

        let eye = CMat::identity(2, 2);
        let v = DVector::<Complex64>::from_fn(4, |m, _| eye[(m / 2, m % 2)]);
        let chi_id = &v * v.adjoint();
        assert!((entanglement_fidelity(&chi_id, &eye).unwrap() - 1.0).abs() < 1e-12);

        let psi3 = DVector::<Complex64>::zeros(3);
        assert!(matches!(
            fidelity_to_target(&rho_pure, &psi3),
            Err(TomoError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            entanglement_fidelity(&chi_id, &CMat::identity(3, 3)),
            Err(TomoError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parameter_and_dataset_validation() {
        let good = vec![TomoRecord {
            prep: None,
            setting: Some("Z".into()),
            counts: counts_map(&[("0", 5), ("1", 5)]),
        }];
        let data = TomoDataset::new(1, good).unwrap();
        assert!(matches!(
            qst_mle(&data, Some(0), &MleOptions::default()),
            Err(TomoError::Param(_))
        ));
        assert!(matches!(
            qst_mle(&data, Some(3), &MleOptions::default()),
            Err(TomoError::Param(_))
        ));
        let empty = TomoDataset::new(1, Vec::new()).unwrap();
        assert!(matches!(
            qst_mle(&empty, None, &MleOptions::default()),
            Err(TomoError::Dataset(_))
        ));
        let with_prep = vec![TomoRecord {
            prep: Some("0".into()),
            setting: Some("Z".into()),
            counts: counts_map(&[("0", 5)]),
        }];
        let data = TomoDataset::new(1, with_prep).unwrap();
        assert!(matches!(
            qst_mle(&data, None, &MleOptions::default()),
            Err(TomoError::Dataset(_))
        ));
        let zero_shots = vec![TomoRecord {
            prep: None,
            setting: Some("Z".into()),
            counts: BTreeMap::new(),
        }];
        let data = TomoDataset::new(1, zero_shots).unwrap();
        assert!(matches!(
            qst_mle(&data, None, &MleOptions::default()),
            Err(TomoError::Dataset(_))
        ));
    }
}
