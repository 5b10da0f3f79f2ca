//! Post-selected linear-optical CNOT on dual-rail qubits.
//!
//! Control and target qubits are encoded in photon paths: logical 0 puts the
//! photon in the first rail of its pair, logical 1 in the second. The gate
//! uses six modes `[c0, c1, t0, t1, a0, a1]` (two ancilla modes stay in the
//! vacuum) and five beamsplitters:
//!
//! 1. `B(-pi/4)` on the target rails — basis change so the central
//!    interference acts as a controlled-Z,
//! 2. three `B(theta*)` with `cos(theta*) = 1/sqrt(3)` — one coupling `c0`
//!    to an ancilla, one coupling `c1` to `t1` (the interfering pair), one
//!    coupling `t0` to the other ancilla,
//! 3. `B(+pi/4)` on the target rails — undo the basis change.
//!
//! Post-selecting on exactly one photon per qubit's rail pair and empty
//! ancillas leaves the CNOT truth table with amplitude ±1/3, so every
//! computational input succeeds with probability 1/9.

use super::{FockState, PhotonicError};
use crate::rng::stream_rng;
use rand::Rng;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

const MODES: usize = 6;
const C0: usize = 0;
const C1: usize = 1;
const T0: usize = 2;
const T1: usize = 3;
const A0: usize = 4;
const A1: usize = 5;

/// Two dual-rail photons encoding `|control, target>`, ancillas in vacuum.
pub fn klm_cnot_input(control: bool, target: bool) -> FockState {
    let mut occ = [0u32; MODES];
    occ[if control { C1 } else { C0 }] = 1;
    occ[if target { T1 } else { T0 }] = 1;
    FockState::from_occupation(&occ, 2).expect("two photons fit the ceiling")
}

/// Runs the six-mode CNOT network in place.
pub fn apply_klm_cnot(state: &mut FockState) -> Result<(), PhotonicError> {
    if state.n_modes() != MODES {
        return Err(PhotonicError::Param(format!(
            "the CNOT network needs {MODES} modes, state has {}",
            state.n_modes()
        )));
    }
    let theta_star = (1.0 / 3.0f64.sqrt()).acos();
    state.apply_beamsplitter(T0, T1, -FRAC_PI_4, 0.0)?;
    state.apply_beamsplitter(C0, A0, theta_star, 0.0)?;
    state.apply_beamsplitter(C1, T1, theta_star, 0.0)?;
    state.apply_beamsplitter(T0, A1, theta_star, 0.0)?;
    state.apply_beamsplitter(T0, T1, FRAC_PI_4, 0.0)?;
    Ok(())
}

/// Classification of one detection record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    /// Exactly one photon per rail pair, ancillas empty.
    Logical { control: bool, target: bool },
    Reject,
}

fn classify(occ: &[u32]) -> Outcome {
    if occ[A0] == 0
        && occ[A1] == 0
        && occ[C0] + occ[C1] == 1
        && occ[T0] + occ[T1] == 1
    {
        Outcome::Logical {
            control: occ[C1] == 1,
            target: occ[T1] == 1,
        }
    } else {
        Outcome::Reject
    }
}

/// Post-selection statistics for one computational input.
#[derive(Debug, Clone, PartialEq)]
pub struct KlmInputStats {
    pub control: bool,
    pub target: bool,
    pub shots: u64,
    pub successes: u64,
    /// Logical outcomes of the successful shots, keyed `"ct"` (e.g. `"10"`).
    pub outcome_counts: BTreeMap<String, u64>,
}

/// Aggregate result of [`klm_cnot_demo`].
#[derive(Debug, Clone, PartialEq)]
pub struct KlmDemo {
    pub per_input: Vec<KlmInputStats>,
    pub total_shots: u64,
    pub total_successes: u64,
    pub success_rate: f64,
}

/// Prepares each computational input, evolves it through the network once,
/// and samples `shots_per_input` detection records per input (full six-mode
/// photon counting). Returns per-input and aggregate post-selection
/// statistics. Deterministic in `(shots_per_input, seed)`.
pub fn klm_cnot_demo(shots_per_input: u64, seed: u64) -> Result<KlmDemo, PhotonicError> {
    let mut per_input = Vec::with_capacity(4);
    let mut total_successes = 0u64;
    for (idx, (control, target)) in [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .enumerate()
    {
        let mut state = klm_cnot_input(control, target);
        apply_klm_cnot(&mut state)?;
        // Detecting all six modes just samples an occupation vector from the
        // Born distribution; draw from it directly.
        let dist: Vec<(Outcome, f64)> = state
            .probabilities()
            .into_iter()
            .map(|(occ, p)| (classify(&occ), p))
            .collect();
        let mut rng = stream_rng(seed, idx as u64);
        let mut successes = 0u64;
        let mut outcome_counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots_per_input {
            let mut u: f64 = rng.random();
            let mut picked = Outcome::Reject;
            for &(outcome, p) in &dist {
                if u < p {
                    picked = outcome;
                    break;
                }
                u -= p;
            }
            if let Outcome::Logical { control: c, target: t } = picked {
                successes += 1;
                let key: String = [c, t].iter().map(|&b| if b { '1' } else { '0' }).collect();
                *outcome_counts.entry(key).or_insert(0) += 1;
            }
        }
        total_successes += successes;
        per_input.push(KlmInputStats {
            control,
            target,
            shots: shots_per_input,
            successes,
            outcome_counts,
        });
    }
    let total_shots = 4 * shots_per_input;
    Ok(KlmDemo {
        per_input,
        total_shots,
        total_successes,
        success_rate: if total_shots > 0 {
            total_successes as f64 / total_shots as f64
        } else {
            0.0
        },
    })
}
