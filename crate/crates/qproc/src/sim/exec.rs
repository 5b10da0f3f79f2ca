//! Circuit execution: exact probabilities, single-shot trajectories, and
//! multi-shot sampling.
//!
//! Sampling is deterministic for a given `(circuit, shots, seed, noise)`
//! regardless of thread count: every shot owns an independent counter-mode
//! RNG stream derived from the seed, so the work can be farmed out to any
//! number of threads without changing results.
//!
//! When the circuit is noiseless with one terminal measurement layer, the
//! sampler takes a fast path: it builds the final state once and draws all
//! shots from the exact distribution in a single sorted-uniform sweep,
//! instead of re-simulating per shot.

use crate::noise::{apply_channel_stochastic, NoiseModel, OpKey, ShotContext};
use crate::qasm::{Circuit, Instruction};
use crate::rng::stream_rng;
use crate::sim::{SimError, StateVector, DEFAULT_MAX_QUBITS};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Execution options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// Refuse circuits wider than this many qubits.
    pub max_qubits: usize,
}

impl Default for SimOptions {
    fn default() -> SimOptions {
        SimOptions {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Exact basis-state probabilities, indexed little-endian (`p[i]` is the
/// probability of the basis state whose bit `q` is `(i >> q) & 1`).
pub type Distribution = Vec<f64>;

/// Measurement counts keyed by classical bitstring.
///
/// Bitstring layout follows register-display convention: the character at
/// string position 0 is the highest-numbered classical bit, the last
/// character is clbit 0. Serializes to/from JSON as
/// `{"counts": {...}, "shots": N, "seed": S}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl CountsHistogram {
    /// Observed frequency of a bitstring (0 if absent).
    pub fn frequency(&self, key: &str) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        *self.counts.get(key).unwrap_or(&0) as f64 / self.shots as f64
    }

    /// Sum of all counts (equals `shots`).
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("histogram serializes")
    }

    pub fn from_json(text: &str) -> Result<CountsHistogram, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Exact output distribution of a unitary circuit (measurements and barriers
/// are ignored; `reset` is rejected because the result would be shot-
/// dependent).
pub fn probabilities(circuit: &Circuit) -> Result<Distribution, SimError> {
    probabilities_opts(circuit, &SimOptions::default())
}

/// [`probabilities`] with explicit options.
pub fn probabilities_opts(circuit: &Circuit, opts: &SimOptions) -> Result<Distribution, SimError> {
    let mut st = StateVector::with_cap(circuit.n_qubits, opts.max_qubits)?;
    for inst in &circuit.instructions {
        match inst {
            Instruction::Gate {
                kind,
                angles,
                qubits,
            } => st.apply_gate(*kind, angles, qubits),
            Instruction::Measure { .. } | Instruction::Barrier { .. } => {}
            Instruction::Reset { .. } => {
                return Err(SimError::NonUnitaryInstruction("reset"));
            }
        }
    }
    Ok(st.probabilities())
}

/// Runs a single shot: one stochastic trajectory through the circuit,
/// including noise, measurement collapse and classical readout. Returns the
/// classical bitstring (clbit `n_clbits-1` leftmost) and the final
/// post-measurement state.
pub fn run_shot(
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    opts: &SimOptions,
    ctx: &mut ShotContext,
) -> Result<(String, StateVector), SimError> {
    let mut st = StateVector::with_cap(circuit.n_qubits, opts.max_qubits)?;
    let mut clbits = vec![b'0'; circuit.n_clbits];

    if let Some(nm) = noise {
        let prep = nm.spam_prep();
        if prep > 0.0 {
            for q in 0..circuit.n_qubits {
                if ctx.rng.random::<f64>() < prep {
                    st.apply_x(q);
                }
            }
        }
    }

    for inst in &circuit.instructions {
        match inst {
            Instruction::Gate {
                kind,
                angles,
                qubits,
            } => {
                let perturbed = noise.and_then(|nm| nm.perturb_angles(*kind, angles, qubits, ctx));
                let effective = perturbed.as_deref().unwrap_or(angles);
                st.apply_gate(*kind, effective, qubits);
                if let Some(nm) = noise {
                    for &(ckind, theta) in nm.coherent(*kind) {
                        for &q in qubits {
                            st.apply_gate(ckind, &[theta], &[q]);
                        }
                    }
                    if let Some(ch) = nm.gate_channel(*kind) {
                        if ch.dim() == 4 {
                            apply_channel_stochastic(&mut st, ch, qubits, &mut ctx.rng)?;
                        } else {
                            for &q in qubits {
                                apply_channel_stochastic(&mut st, ch, &[q], &mut ctx.rng)?;
                            }
                        }
                    }
                    apply_idle(&mut st, nm, OpKey::Gate(*kind), qubits, ctx)?;
                }
            }
            Instruction::Measure { qubit, clbit } => {
                let mut bit = st.measure(*qubit, &mut ctx.rng)?;
                if let Some(nm) = noise {
                    let ro = nm.spam_readout();
                    if ro > 0.0 && ctx.rng.random::<f64>() < ro {
                        bit ^= 1;
                    }
                    apply_idle(&mut st, nm, OpKey::Measure, &[*qubit], ctx)?;
                }
                clbits[circuit.n_clbits - 1 - clbit] = b'0' + bit;
            }
            Instruction::Reset { qubit } => {
                let bit = st.measure(*qubit, &mut ctx.rng)?;
                if bit == 1 {
                    st.apply_x(*qubit);
                }
                if let Some(nm) = noise {
                    apply_idle(&mut st, nm, OpKey::Reset, &[*qubit], ctx)?;
                }
            }
            Instruction::Barrier { .. } => {}
        }
    }

    let bits = String::from_utf8(clbits).expect("bitstring is ASCII");
    Ok((bits, st))
}

fn apply_idle(
    st: &mut StateVector,
    nm: &NoiseModel,
    op: OpKey,
    qubits: &[usize],
    ctx: &mut ShotContext,
) -> Result<(), SimError> {
    for &q in qubits {
        if let Some(ch) = nm.idle_channel(op, q) {
            apply_channel_stochastic(st, ch, &[q], &mut ctx.rng)?;
        }
    }
    Ok(())
}

/// Samples `shots` measurement records from the circuit under an optional
/// noise model. Deterministic in `(circuit, shots, seed, noise)`; thread
/// count does not affect the result.
pub fn sample(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<CountsHistogram, SimError> {
    sample_opts(circuit, shots, seed, noise, &SimOptions::default())
}

/// [`sample`] with explicit options.
pub fn sample_opts(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
    opts: &SimOptions,
) -> Result<CountsHistogram, SimError> {
    let noise_active = noise.map(|nm| !nm.is_trivial()).unwrap_or(false);
    let counts = if !noise_active && fast_path_eligible(circuit) {
        sample_from_final_state(circuit, shots, seed, opts)?
    } else {
        (0..shots)
            .into_par_iter()
            .try_fold(BTreeMap::new, |mut m: BTreeMap<String, u64>, shot| {
                let mut ctx = ShotContext::new(stream_rng(seed, shot));
                let (bits, _) = run_shot(circuit, noise, opts, &mut ctx)?;
                *m.entry(bits).or_insert(0) += 1;
                Ok::<_, SimError>(m)
            })
            .try_reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                Ok(a)
            })?
    };
    Ok(CountsHistogram {
        counts,
        shots,
        seed,
    })
}

/// The fast path needs one terminal measurement layer writing to distinct
/// clbits, and no `reset`.
fn fast_path_eligible(circuit: &Circuit) -> bool {
    if !circuit.measurements_are_terminal() {
        return false;
    }
    let mut seen = vec![false; circuit.n_clbits];
    for inst in &circuit.instructions {
        match inst {
            Instruction::Reset { .. } => return false,
            Instruction::Measure { clbit, .. } => {
                if seen[*clbit] {
                    return false;
                }
                seen[*clbit] = true;
            }
            _ => {}
        }
    }
    true
}

/// Builds the final pre-measurement state once and draws every shot from the
/// exact distribution with one sorted-uniform sweep. Shot outcomes are drawn
/// from a dedicated RNG stream (`u64::MAX`) so they cannot collide with
/// per-shot trajectory streams.
fn sample_from_final_state(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<BTreeMap<String, u64>, SimError> {
    let mut st = StateVector::with_cap(circuit.n_qubits, opts.max_qubits)?;
    let mut measures: Vec<(usize, usize)> = Vec::new();
    for inst in &circuit.instructions {
        match inst {
            Instruction::Gate {
                kind,
                angles,
                qubits,
            } => st.apply_gate(*kind, angles, qubits),
            Instruction::Measure { qubit, clbit } => measures.push((*qubit, *clbit)),
            Instruction::Barrier { .. } => {}
            Instruction::Reset { .. } => {
                return Err(SimError::Internal(
                    "fast path invoked on a circuit with reset".into(),
                ));
            }
        }
    }
    let probs = st.probabilities();

    let mut rng = stream_rng(seed, u64::MAX);
    let mut uniforms: Vec<f64> = (0..shots).map(|_| rng.random::<f64>()).collect();
    uniforms.sort_unstable_by(f64::total_cmp);

    let bitstring_for = |basis: usize| -> String {
        let mut chars = vec![b'0'; circuit.n_clbits];
        for &(q, c) in &measures {
            if (basis >> q) & 1 == 1 {
                chars[circuit.n_clbits - 1 - c] = b'1';
            }
        }
        String::from_utf8(chars).expect("bitstring is ASCII")
    };

    let mut counts = BTreeMap::new();
    let mut j = 0usize;
    let mut cum = 0.0f64;
    let mut last_nonzero = 0usize;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cum += p;
        last_nonzero = i;
        let start = j;
        while j < uniforms.len() && uniforms[j] < cum {
            j += 1;
        }
        if j > start {
            *counts.entry(bitstring_for(i)).or_insert(0) += (j - start) as u64;
        }
    }
    // Floating-point rounding can leave cum slightly below the largest
    // uniform; attribute the remainder to the last reachable outcome.
    if j < uniforms.len() {
        *counts.entry(bitstring_for(last_nonzero)).or_insert(0) += (uniforms.len() - j) as u64;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn bell() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.u(0, FRAC_PI_2, 0.0, PI).cx(0, 1).measure_all();
        c
    }

    #[test]
    fn bell_counts_split_between_00_and_11() {
        let hist = sample(&bell(), 4000, 1, None).unwrap();
        assert_eq!(hist.total(), 4000);
        let keys: Vec<_> = hist.counts.keys().cloned().collect();
        assert_eq!(keys, vec!["00", "11"]);
        let f = hist.frequency("00");
        assert!((f - 0.5).abs() < 0.04, "frequency {f} too far from 1/2");
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample(&bell(), 1000, 42, None).unwrap();
        let b = sample(&bell(), 1000, 42, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_circuit_same_counts_on_both_paths() {
        // |11> -> CX(0,1) -> |01> (qubit 1 cleared), so c1c0 = "01".
        let mut c = Circuit::new(2, 2);
        c.u(0, PI, 0.0, PI).u(1, PI, 0.0, PI).cx(0, 1).measure_all();
        let fast = sample(&c, 500, 7, None).unwrap();
        assert_eq!(fast.counts, BTreeMap::from([("01".to_string(), 500)]));

        // A leading reset is a no-op on |00> but forces the per-shot path.
        let mut slow_c = Circuit::new(2, 2);
        slow_c.reset(0);
        slow_c.u(0, PI, 0.0, PI).u(1, PI, 0.0, PI).cx(0, 1).measure_all();
        let slow = sample(&slow_c, 500, 7, None).unwrap();
        assert_eq!(slow.counts, fast.counts);
    }

    #[test]
    fn mid_circuit_measurement_works() {
        // c0 = first outcome of H|0>, then X flips the qubit, c1 = !c0.
        let mut c = Circuit::new(1, 2);
        c.u(0, FRAC_PI_2, 0.0, PI).measure(0, 0);
        c.u(0, PI, 0.0, PI).measure(0, 1);
        let hist = sample(&c, 2000, 5, None).unwrap();
        for key in hist.counts.keys() {
            assert!(key == "01" || key == "10", "impossible record {key}");
        }
        assert_eq!(hist.total(), 2000);
        let f = hist.frequency("10");
        assert!((f - 0.5).abs() < 0.06, "frequency {f} too far from 1/2");
    }

    #[test]
    fn spam_errors_flip_outcomes() {
        use crate::noise::NoiseModel;
        // Certain readout flip: X|0> measures as 0.
        let ro = NoiseModel::from_json(r#"{"spam": {"readout": 1.0}}"#).unwrap();
        let mut c = Circuit::new(1, 1);
        c.u(0, PI, 0.0, PI).measure(0, 0);
        let hist = sample(&c, 100, 3, Some(&ro)).unwrap();
        assert_eq!(hist.counts, BTreeMap::from([("0".to_string(), 100)]));

        // Certain preparation flip: empty circuit measures as 1.
        let prep = NoiseModel::from_json(r#"{"spam": {"prep": 1.0}}"#).unwrap();
        let mut c2 = Circuit::new(1, 1);
        c2.measure(0, 0);
        let hist2 = sample(&c2, 100, 3, Some(&prep)).unwrap();
        assert_eq!(hist2.counts, BTreeMap::from([("1".to_string(), 100)]));
    }

    #[test]
    fn depolarizing_channel_mixes_outcomes() {
        use crate::noise::NoiseModel;
        // After X with depolarizing p, P(measure 0) = 2p/3 = 1/2 at p = 3/4.
        let nm = NoiseModel::from_json(
            r#"{"gates": {"u": {"channel": {"type": "depolarizing1", "p": 0.75}}}}"#,
        )
        .unwrap();
        let mut c = Circuit::new(1, 1);
        c.u(0, PI, 0.0, PI).measure(0, 0);
        let hist = sample(&c, 4000, 11, Some(&nm)).unwrap();
        let f = hist.frequency("0");
        assert!((f - 0.5).abs() < 0.04, "frequency {f} too far from 1/2");
    }

    #[test]
    fn probabilities_rejects_reset() {
        let mut c = Circuit::new(1, 0);
        c.reset(0);
        assert!(matches!(
            probabilities(&c),
            Err(SimError::NonUnitaryInstruction("reset"))
        ));
    }

    #[test]
    fn probabilities_of_bell_state() {
        let p = probabilities(&bell()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!(p[1].abs() < 1e-12);
        assert!(p[2].abs() < 1e-12);
        assert!((p[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn histogram_json_round_trip() {
        let hist = sample(&bell(), 100, 9, None).unwrap();
        let text = hist.to_json();
        assert!(text.contains("\"counts\""));
        assert!(text.contains("\"shots\""));
        assert!(text.contains("\"seed\""));
        let back = CountsHistogram::from_json(&text).unwrap();
        assert_eq!(back, hist);
    }

    #[test]
    fn unmeasured_clbits_read_zero() {
        let mut c = Circuit::new(1, 3);
        c.u(0, PI, 0.0, PI).measure(0, 0);
        let hist = sample(&c, 10, 0, None).unwrap();
        assert_eq!(hist.counts, BTreeMap::from([("001".to_string(), 10)]));
    }

    #[test]
    fn zero_shots_gives_empty_histogram() {
        let hist = sample(&bell(), 0, 0, None).unwrap();
        assert!(hist.counts.is_empty());
        assert_eq!(hist.shots, 0);
    }
}
