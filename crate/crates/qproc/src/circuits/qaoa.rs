//! Fixed-angle QAOA: circuit generation, exact energies, and angle training
//! by maximizing the worst-case success probability over an instance family.

use super::qubo::QuboProblem;
use super::CircuitsError;
use crate::qasm::Circuit;
use crate::rng::stream_rng;
use crate::sim;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// One (beta, gamma) pair per layer. The layer-`l` unitary is
/// `exp(-i beta_l H_mix) . exp(-i gamma_l H_targ)` with `H_mix = sum_i X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnglesJson", into = "AnglesJson")]
pub struct FixedAngles {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnglesJson {
    p: usize,
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl TryFrom<AnglesJson> for FixedAngles {
    type Error = String;
    fn try_from(j: AnglesJson) -> Result<FixedAngles, String> {
        if j.betas.len() != j.p || j.gammas.len() != j.p {
            return Err(format!(
                "angle lists must both have length p = {}, got {} betas and {} gammas",
                j.p,
                j.betas.len(),
                j.gammas.len()
            ));
        }
        FixedAngles::new(j.betas, j.gammas).map_err(|e| e.to_string())
    }
}

impl From<FixedAngles> for AnglesJson {
    fn from(a: FixedAngles) -> AnglesJson {
        AnglesJson {
            p: a.p(),
            betas: a.betas,
            gammas: a.gammas,
        }
    }
}

impl FixedAngles {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<FixedAngles, CircuitsError> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(CircuitsError::Param(format!(
                "need equal nonzero numbers of betas and gammas, got {} and {}",
                betas.len(),
                gammas.len()
            )));
        }
        if betas.iter().chain(&gammas).any(|a| !a.is_finite()) {
            return Err(CircuitsError::Param("angles must be finite".into()));
        }
        Ok(FixedAngles { betas, gammas })
    }

    /// All-zero angles (identity layers) — the canonical baseline.
    pub fn zeros(p: usize) -> FixedAngles {
        FixedAngles {
            betas: vec![0.0; p],
            gammas: vec![0.0; p],
        }
    }

    pub fn p(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn from_json(text: &str) -> Result<FixedAngles, CircuitsError> {
        serde_json::from_str(text).map_err(|e| CircuitsError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("angles serialize")
    }
}

/// Builds the QAOA state-preparation circuit: `|+>^n`, then per layer the
/// target phase separator — `rzz(gamma * s_ij)` per coupling and
/// `rz(2 * gamma * s_ii)` per linear term — followed by the mixer
/// `rx(2 * beta)` on every qubit. Variable `i` lives on qubit `i`; no
/// measurements are appended.
pub fn qaoa_circuit(q: &QuboProblem, angles: &FixedAngles) -> Circuit {
    let n = q.n_vars();
    let mut c = Circuit::new(n, 0);
    for i in 0..n {
        c.u(i, FRAC_PI_2, 0.0, PI); // Hadamard
    }
    for (&beta, &gamma) in angles.betas().iter().zip(angles.gammas()) {
        for ((i, j), s) in q.terms() {
            if i == j {
                c.rz(i, 2.0 * gamma * s);
            } else {
                c.rzz(i, j, gamma * s);
            }
        }
        for i in 0..n {
            c.rx(i, 2.0 * beta);
        }
    }
    c
}

/// Exact noiseless energy `<H_targ> = sum s_ij <Z_i Z_j> + sum s_ii <Z_i>`
/// of the QAOA state (the problem's constant offset is not part of
/// `H_targ` and is excluded).
pub fn qaoa_energy(q: &QuboProblem, angles: &FixedAngles) -> Result<f64, CircuitsError> {
    let probs = sim::probabilities(&qaoa_circuit(q, angles))?;
    Ok(probs
        .iter()
        .enumerate()
        .map(|(idx, &p)| p * (q.value_index(idx as u64) - q.offset))
        .sum())
}

/// Optimizer budget for [`train_fixed_angles`]: `n_starts` pattern-search
/// restarts (the all-zero start is always included), up to `max_iters`
/// polling rounds each, stopping once all steps shrink below `tol` times
/// the box width.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub n_starts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            n_starts: 8,
            max_iters: 80,
            tol: 1e-3,
        }
    }
}

/// Outcome of angle training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub angles: FixedAngles,
    /// The achieved objective: min over instances of the success probability.
    pub min_success: f64,
    /// Success probability per training instance at the returned angles.
    pub per_instance: Vec<f64>,
}

/// Largest instance size accepted by the trainer (exhaustive-optima scale).
pub const MAX_TRAIN_VARS: usize = 12;

/// Trains one fixed `(beta, gamma)` schedule for a family of instances by
/// maximizing `min_i P_C(i)`, the worst-case probability mass on the exact
/// optima of each instance. Derivative-free multi-start pattern search over
/// the box `[0, pi)^p x [0, 2 pi)^p`; candidate evaluations run instances
/// in parallel. Deterministic for fixed `(instances, p, cfg, seed)`.
pub fn train_fixed_angles(
    instances: &[QuboProblem],
    p: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<TrainResult, CircuitsError> {
    if instances.is_empty() {
        return Err(CircuitsError::Param("no training instances given".into()));
    }
    if p == 0 {
        return Err(CircuitsError::Param("need at least one layer".into()));
    }
    if cfg.n_starts == 0 {
        return Err(CircuitsError::Param("need at least one start".into()));
    }
    for inst in instances {
        if inst.n_vars() > MAX_TRAIN_VARS {
            return Err(CircuitsError::TooManyVariables {
                n: inst.n_vars(),
                max: MAX_TRAIN_VARS,
            });
        }
    }
    let optima: Vec<Vec<u64>> = instances
        .iter()
        .map(|inst| inst.enumerate_optima().map(|(_, o)| o))
        .collect::<Result<_, _>>()?;

    // Parameter vector x = [betas..., gammas...]; box widths per dimension.
    let ranges: Vec<f64> = std::iter::repeat_n(PI, p)
        .chain(std::iter::repeat_n(2.0 * PI, p))
        .collect();
    let evaluate = |x: &[f64]| -> Result<(f64, Vec<f64>), CircuitsError> {
        let angles = FixedAngles::new(x[..p].to_vec(), x[p..].to_vec())?;
        let per: Vec<f64> = instances
            .par_iter()
            .zip(&optima)
            .map(|(inst, opt)| -> Result<f64, CircuitsError> {
                let probs = sim::probabilities(&qaoa_circuit(inst, &angles))?;
                Ok(opt.iter().map(|&idx| probs[idx as usize]).sum())
            })
            .collect::<Result<_, _>>()?;
        let worst = per.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((worst, per))
    };

    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None; // (objective, x, per_instance)
    for start in 0..cfg.n_starts {
        let mut x: Vec<f64> = if start == 0 {
            vec![0.0; 2 * p]
        } else {
            let mut rng = stream_rng(seed, start as u64);
            ranges.iter().map(|&r| rng.random::<f64>() * r).collect()
        };
        let (mut fx, mut per_x) = evaluate(&x)?;
        let mut steps: Vec<f64> = ranges.iter().map(|r| r / 4.0).collect();
        for _ in 0..cfg.max_iters {
            let mut improved: Option<(f64, Vec<f64>, Vec<f64>)> = None;
            for dim in 0..x.len() {
                for dir in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[dim] = (y[dim] + dir * steps[dim]).clamp(0.0, ranges[dim] * (1.0 - 1e-12));
                    if y[dim] == x[dim] {
                        continue;
                    }
                    let (fy, per_y) = evaluate(&y)?;
                    if fy > fx && improved.as_ref().is_none_or(|(fb, _, _)| fy > *fb) {
                        improved = Some((fy, y, per_y));
                    }
                }
            }
            match improved {
                Some((fy, y, per_y)) => {
                    x = y;
                    fx = fy;
                    per_x = per_y;
                }
                None => {
                    for s in &mut steps {
                        *s /= 2.0;
                    }
                    if steps
                        .iter()
                        .zip(&ranges)
                        .all(|(s, r)| s / r < cfg.tol)
                    {
                        break;
                    }
                }
            }
        }
        if best.as_ref().is_none_or(|(fb, _, _)| fx > *fb) {
            best = Some((fx, x, per_x));
        }
    }
    let (min_success, x, per_instance) = best.expect("at least one start ran");
    Ok(TrainResult {
        angles: FixedAngles::new(x[..p].to_vec(), x[p..].to_vec())?,
        min_success,
        per_instance,
    })
}
