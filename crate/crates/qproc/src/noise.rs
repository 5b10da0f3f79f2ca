//! Stochastic noise models for the state-vector engine.
//!
//! Noise is simulated per shot by quantum trajectories: after each ideal
//! gate, a Kraus channel attached to the gate kind fires stochastically
//! (branch α chosen with probability `<psi|K_α† K_α|psi>`, then the state is
//! renormalized). Averaging many trajectories reproduces the exact
//! density-matrix evolution of the channel.
//!
//! Three further error families are supported:
//!
//! * **Angle errors** on the native rotation gates. Every affected angle is
//!   perturbed as `theta + theta_c + theta_m + theta_nm`, where `theta_c` is
//!   a constant calibration offset, `theta_m ~ N(0, sigma_m^2)` is drawn
//!   fresh at every application, and `theta_nm ~ N(0, sigma_nm^2)` is drawn
//!   once per (gate kind, ordered qubit tuple) at its first use in a shot
//!   and then reused for the rest of that shot (slow drift that is constant
//!   within a run but independent across runs).
//! * **Coherent errors**: fixed extra rotations appended after a gate kind.
//! * **SPAM**: preparation flips (X with probability `prep` right after
//!   initialization) and readout flips (the classical bit flips with
//!   probability `readout` after a projective measurement).
//!
//! Idle decoherence is attached through per-qubit `T1`/`T2` times plus
//! per-operation durations: after an operation with a configured duration,
//! a `t1t2` channel acts on each involved qubit that has times configured.

use crate::qasm::GateKind;
use crate::sim::{Mat2, Mat4, StateVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Noise-model failure: bad schema, bad parameters, or a runtime
/// inconsistency in channel application.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("invalid noise schema: {0}")]
    Schema(String),
    #[error("invalid noise parameter: {0}")]
    Param(String),
    #[error("Kraus completeness violated: sum K†K deviates from identity by {dev:.3e}")]
    Completeness { dev: f64 },
    #[error("channel of dimension {dim} cannot act on {n} target qubit(s)")]
    DimMismatch { dim: usize, n: usize },
    #[error("channel branch probabilities sum to {sum}, expected 1 within 1e-9")]
    BranchSum { sum: f64 },
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I2: Mat2 = [
    [Complex64::ONE, Complex64::ZERO],
    [Complex64::ZERO, Complex64::ONE],
];
const X2: Mat2 = [
    [Complex64::ZERO, Complex64::ONE],
    [Complex64::ONE, Complex64::ZERO],
];
const Y2: Mat2 = [
    [Complex64::ZERO, Complex64::new(0.0, -1.0)],
    [Complex64::new(0.0, 1.0), Complex64::ZERO],
];
const Z2: Mat2 = [
    [Complex64::ONE, Complex64::ZERO],
    [Complex64::ZERO, Complex64::new(-1.0, 0.0)],
];

fn scale2(m: &Mat2, s: f64) -> Mat2 {
    let mut out = *m;
    for row in &mut out {
        for v in row {
            *v *= s;
        }
    }
    out
}

fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Kronecker product with `a` on the low bit of the local basis.
fn kron2(low: &Mat2, high: &Mat2) -> Mat4 {
    let mut out = [[Complex64::ZERO; 4]; 4];
    for hi in 0..2 {
        for hj in 0..2 {
            for li in 0..2 {
                for lj in 0..2 {
                    out[2 * hi + li][2 * hj + lj] = high[hi][hj] * low[li][lj];
                }
            }
        }
    }
    out
}

/// A Kraus channel on one qubit or on a qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub enum KrausSet {
    Single(Vec<Mat2>),
    Pair(Vec<Mat4>),
}

impl KrausSet {
    /// Hilbert-space dimension the operators act on (2 or 4).
    pub fn dim(&self) -> usize {
        match self {
            KrausSet::Single(_) => 2,
            KrausSet::Pair(_) => 4,
        }
    }

    pub fn n_ops(&self) -> usize {
        match self {
            KrausSet::Single(ops) => ops.len(),
            KrausSet::Pair(ops) => ops.len(),
        }
    }

    /// Verifies the completeness relation `sum K†K = I` within `tol`
    /// (maximum absolute entry deviation).
    pub fn check_completeness(&self, tol: f64) -> Result<(), NoiseError> {
        let dev = match self {
            KrausSet::Single(ops) => {
                let mut s = [[Complex64::ZERO; 2]; 2];
                for k in ops {
                    for i in 0..2 {
                        for j in 0..2 {
                            s[i][j] += k[0][i].conj() * k[0][j] + k[1][i].conj() * k[1][j];
                        }
                    }
                }
                let mut dev = 0.0f64;
                for (i, row) in s.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                        dev = dev.max((v - want).norm());
                    }
                }
                dev
            }
            KrausSet::Pair(ops) => {
                let mut s = [[Complex64::ZERO; 4]; 4];
                for k in ops {
                    for i in 0..4 {
                        for j in 0..4 {
                            for r in 0..4 {
                                s[i][j] += k[r][i].conj() * k[r][j];
                            }
                        }
                    }
                }
                let mut dev = 0.0f64;
                for (i, row) in s.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                        dev = dev.max((v - want).norm());
                    }
                }
                dev
            }
        };
        if dev > tol {
            Err(NoiseError::Completeness { dev })
        } else {
            Ok(())
        }
    }

    /// Amplitude damping with decay probability `a`:
    /// `K0 = [[1,0],[0,sqrt(1-a)]], K1 = [[0,sqrt(a)],[0,0]]`.
    pub fn amplitude_damping(a: f64) -> Result<KrausSet, NoiseError> {
        check_prob("amplitude damping a", a)?;
        let mut k0 = I2;
        k0[1][1] = c((1.0 - a).sqrt());
        let mut k1 = [[Complex64::ZERO; 2]; 2];
        k1[0][1] = c(a.sqrt());
        Ok(KrausSet::Single(vec![k0, k1]))
    }

    /// Phase damping with dephasing probability `b`:
    /// `K0 = [[1,0],[0,sqrt(1-b)]], K1 = [[0,0],[0,sqrt(b)]]`.
    pub fn phase_damping(b: f64) -> Result<KrausSet, NoiseError> {
        check_prob("phase damping b", b)?;
        let mut k0 = I2;
        k0[1][1] = c((1.0 - b).sqrt());
        let mut k1 = [[Complex64::ZERO; 2]; 2];
        k1[1][1] = c(b.sqrt());
        Ok(KrausSet::Single(vec![k0, k1]))
    }

    /// Combined relaxation/dephasing over an idle window of length `t` (same
    /// units as `t1`, `t2`): amplitude damping with `a = 1 - exp(-t/T1)`
    /// composed with phase damping with `b = 1 - exp(-t/Tphi)`, where
    /// [`t_phi`] converts the measured `T2` into the pure-dephasing time.
    pub fn t1t2(t1: f64, t2: f64, t: f64) -> Result<KrausSet, NoiseError> {
        if !(t1 > 0.0) || !(t2 > 0.0) {
            return Err(NoiseError::Param(format!(
                "T1 and T2 must be positive, got T1={t1}, T2={t2}"
            )));
        }
        if t2 > 2.0 * t1 {
            return Err(NoiseError::Param(format!(
                "T2 <= 2*T1 is required, got T1={t1}, T2={t2}"
            )));
        }
        if !(t >= 0.0) {
            return Err(NoiseError::Param(format!("idle time must be >= 0, got {t}")));
        }
        let a = 1.0 - (-t / t1).exp();
        let tphi = t_phi(t1, t2);
        let b = if tphi.is_finite() {
            1.0 - (-t / tphi).exp()
        } else {
            0.0
        };
        let amp = match KrausSet::amplitude_damping(a)? {
            KrausSet::Single(ops) => ops,
            KrausSet::Pair(_) => unreachable!(),
        };
        let ph = match KrausSet::phase_damping(b)? {
            KrausSet::Single(ops) => ops,
            KrausSet::Pair(_) => unreachable!(),
        };
        let mut ops = Vec::new();
        for p in &ph {
            for a in &amp {
                let k = matmul2(p, a);
                let norm: f64 = k.iter().flatten().map(|v| v.norm_sqr()).sum();
                if norm > 1e-30 {
                    ops.push(k);
                }
            }
        }
        Ok(KrausSet::Single(ops))
    }

    /// Single-qubit depolarizing channel
    /// `{sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z}`.
    pub fn depolarizing1(p: f64) -> Result<KrausSet, NoiseError> {
        check_prob("depolarizing p", p)?;
        let w = (p / 3.0).sqrt();
        Ok(KrausSet::Single(vec![
            scale2(&I2, (1.0 - p).sqrt()),
            scale2(&X2, w),
            scale2(&Y2, w),
            scale2(&Z2, w),
        ]))
    }

    /// Two-qubit depolarizing channel: identity with weight `1-p` plus the
    /// 15 non-identity Pauli pairs with weight `p/15` each.
    pub fn depolarizing2(p: f64) -> Result<KrausSet, NoiseError> {
        check_prob("depolarizing p", p)?;
        let paulis = [I2, X2, Y2, Z2];
        let w = (p / 15.0).sqrt();
        let mut ops = Vec::with_capacity(16);
        for (hi, ph) in paulis.iter().enumerate() {
            for (lo, pl) in paulis.iter().enumerate() {
                let mut k = kron2(pl, ph);
                let scale = if hi == 0 && lo == 0 { (1.0 - p).sqrt() } else { w };
                for row in &mut k {
                    for v in row {
                        *v *= scale;
                    }
                }
                ops.push(k);
            }
        }
        Ok(KrausSet::Pair(ops))
    }

    /// General Pauli channel `{sqrt(1-px-py-pz) I, sqrt(px) X, sqrt(py) Y, sqrt(pz) Z}`.
    pub fn pauli(px: f64, py: f64, pz: f64) -> Result<KrausSet, NoiseError> {
        for (name, p) in [("px", px), ("py", py), ("pz", pz)] {
            check_prob(name, p)?;
        }
        let total = px + py + pz;
        if total > 1.0 + 1e-12 {
            return Err(NoiseError::Param(format!(
                "Pauli probabilities sum to {total}, must be <= 1"
            )));
        }
        Ok(KrausSet::Single(vec![
            scale2(&I2, (1.0 - total).max(0.0).sqrt()),
            scale2(&X2, px.sqrt()),
            scale2(&Y2, py.sqrt()),
            scale2(&Z2, pz.sqrt()),
        ]))
    }

    /// Bit-flip channel `{sqrt(1-p) I, sqrt(p) X}` modelling a readout flip
    /// as a quantum operation. (The SPAM `readout` parameter instead flips
    /// the recorded classical bit, which is equivalent for terminal
    /// measurements.)
    pub fn readout_flip(p: f64) -> Result<KrausSet, NoiseError> {
        check_prob("readout flip p", p)?;
        Ok(KrausSet::Single(vec![
            scale2(&I2, (1.0 - p).sqrt()),
            scale2(&X2, p.sqrt()),
        ]))
    }

    /// Builds a channel from its serialized description and verifies
    /// completeness to 1e-12.
    pub fn from_spec(spec: &ChannelSpec) -> Result<KrausSet, NoiseError> {
        let set = match *spec {
            ChannelSpec::Amplitude { a } => KrausSet::amplitude_damping(a)?,
            ChannelSpec::Phase { b } => KrausSet::phase_damping(b)?,
            ChannelSpec::T1t2 { t1, t2, t } => KrausSet::t1t2(t1, t2, t)?,
            ChannelSpec::Depolarizing1 { p } => KrausSet::depolarizing1(p)?,
            ChannelSpec::Depolarizing2 { p } => KrausSet::depolarizing2(p)?,
            ChannelSpec::Pauli { px, py, pz } => KrausSet::pauli(px, py, pz)?,
            ChannelSpec::ReadoutFlip { p } => KrausSet::readout_flip(p)?,
        };
        set.check_completeness(1e-12)?;
        Ok(set)
    }
}

fn check_prob(name: &str, p: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(NoiseError::Param(format!("{name} must lie in [0,1], got {p}")))
    }
}

/// Pure-dephasing time `Tphi = T1*T2 / (2*T1 - T2)`; infinite when
/// `T2 = 2*T1` (no pure dephasing).
pub fn t_phi(t1: f64, t2: f64) -> f64 {
    let denom = 2.0 * t1 - t2;
    if denom.abs() < 1e-300 {
        f64::INFINITY
    } else {
        t1 * t2 / denom
    }
}

/// Applies one Kraus channel stochastically: branch α is selected with
/// probability `<psi|K_α† K_α|psi>` and the state is renormalized.
/// Returns the selected branch index.
pub fn apply_channel_stochastic<R: Rng>(
    state: &mut StateVector,
    kraus: &KrausSet,
    targets: &[usize],
    rng: &mut R,
) -> Result<usize, NoiseError> {
    match kraus {
        KrausSet::Single(ops) => {
            if targets.len() != 1 {
                return Err(NoiseError::DimMismatch {
                    dim: 2,
                    n: targets.len(),
                });
            }
            let q = targets[0];
            let mask = 1usize << q;
            let mut probs = vec![0.0f64; ops.len()];
            let amps = state.amplitudes();
            for i in 0..amps.len() {
                if i & mask != 0 {
                    continue;
                }
                let a0 = amps[i];
                let a1 = amps[i | mask];
                for (k, p) in ops.iter().zip(probs.iter_mut()) {
                    *p += (k[0][0] * a0 + k[0][1] * a1).norm_sqr()
                        + (k[1][0] * a0 + k[1][1] * a1).norm_sqr();
                }
            }
            let chosen = select_branch(&probs, rng)?;
            state.apply_1q(q, &ops[chosen]);
            state.renormalize();
            Ok(chosen)
        }
        KrausSet::Pair(ops) => {
            if targets.len() != 2 {
                return Err(NoiseError::DimMismatch {
                    dim: 4,
                    n: targets.len(),
                });
            }
            let (qa, qb) = (targets[0], targets[1]);
            let (ma, mb) = (1usize << qa, 1usize << qb);
            let mut probs = vec![0.0f64; ops.len()];
            let amps = state.amplitudes();
            for i in 0..amps.len() {
                if i & ma != 0 || i & mb != 0 {
                    continue;
                }
                let a = [amps[i], amps[i | ma], amps[i | mb], amps[i | ma | mb]];
                for (k, p) in ops.iter().zip(probs.iter_mut()) {
                    for row in k {
                        *p += (row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3])
                            .norm_sqr();
                    }
                }
            }
            let chosen = select_branch(&probs, rng)?;
            state.apply_2q(qa, qb, &ops[chosen]);
            state.renormalize();
            Ok(chosen)
        }
    }
}

fn select_branch<R: Rng>(probs: &[f64], rng: &mut R) -> Result<usize, NoiseError> {
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(NoiseError::BranchSum { sum });
    }
    let u: f64 = rng.random::<f64>() * sum;
    let mut cum = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return Ok(i);
        }
    }
    Ok(probs.len() - 1)
}

// ---------------------------------------------------------------------------
// Serialized configuration
// ---------------------------------------------------------------------------

/// One channel description in the noise-config JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Amplitude { a: f64 },
    Phase { b: f64 },
    T1t2 { t1: f64, t2: f64, t: f64 },
    Depolarizing1 { p: f64 },
    Depolarizing2 { p: f64 },
    Pauli { px: f64, py: f64, pz: f64 },
    ReadoutFlip { p: f64 },
}

/// Angle-error parameters for one angle of a native rotation gate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleErrorSpec {
    /// Constant calibration offset added to every application.
    #[serde(default)]
    pub theta_c: f64,
    /// Std-dev of the Markovian jitter, redrawn at every application.
    #[serde(default)]
    pub sigma_m: f64,
    /// Std-dev of the non-Markovian drift, drawn once per
    /// (gate kind, qubit tuple) per shot.
    #[serde(default)]
    pub sigma_nm: f64,
}

/// A fixed extra rotation appended after each application of a gate kind,
/// acting on every target qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentSpec {
    /// One of `rx`, `ry`, `rz`.
    pub gate: String,
    pub theta: f64,
}

/// Noise attached to one gate kind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateNoiseSpec {
    /// Kraus channel fired after the ideal gate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    /// Angle-error parameters keyed by angle name (`"theta"`, and `"phi"`
    /// for the `r` gate).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub angle_errors: BTreeMap<String, AngleErrorSpec>,
    /// Fixed coherent rotations appended after the gate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coherent: Vec<CoherentSpec>,
}

/// Relaxation times of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
}

/// State-preparation and readout error probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpamSpec {
    #[serde(default)]
    pub prep: f64,
    #[serde(default)]
    pub readout: f64,
}

/// The on-disk noise configuration. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Per-gate-kind noise, keyed by gate name (`u`, `cx`, `r`, `rx`, `ry`,
    /// `rz`, `rxx`, `rzz`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gates: BTreeMap<String, GateNoiseSpec>,
    /// Per-qubit relaxation times, keyed by decimal qubit index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub qubits: BTreeMap<String, QubitSpec>,
    /// Operation durations (same time units as `T1`/`T2`), keyed by gate
    /// name or `measure`/`reset`. Together with `qubits` they attach idle
    /// `t1t2` decoherence after each timed operation.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub durations: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spam: Option<SpamSpec>,
}

// ---------------------------------------------------------------------------
// Compiled model
// ---------------------------------------------------------------------------

/// Operations that can carry a duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKey {
    Gate(GateKind),
    Measure,
    Reset,
}

#[derive(Debug, Clone)]
struct CompiledGateNoise {
    channel: Option<KrausSet>,
    /// One entry per angle slot of the kind; `None` = no error configured.
    angle_errors: Vec<Option<AngleErrorSpec>>,
    coherent: Vec<(GateKind, f64)>,
}

/// A validated, compiled noise model ready for trajectory simulation.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    per_gate: HashMap<GateKind, CompiledGateNoise>,
    /// Idle decoherence channel per (operation, qubit) pair.
    idle: HashMap<(OpKey, usize), KrausSet>,
    spam_prep: f64,
    spam_readout: f64,
    has_angle_errors: bool,
}

fn angle_slot_names(kind: GateKind) -> &'static [&'static str] {
    match kind {
        GateKind::R => &["theta", "phi"],
        GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RXX | GateKind::RZZ => &["theta"],
        GateKind::U | GateKind::CX => &[],
    }
}

impl NoiseModel {
    /// Parses and validates a JSON noise configuration.
    pub fn from_json(text: &str) -> Result<NoiseModel, NoiseError> {
        let cfg: NoiseConfig =
            serde_json::from_str(text).map_err(|e| NoiseError::Schema(e.to_string()))?;
        NoiseModel::from_config(&cfg)
    }

    /// Validates and compiles a configuration.
    pub fn from_config(cfg: &NoiseConfig) -> Result<NoiseModel, NoiseError> {
        let mut per_gate = HashMap::new();
        for (name, spec) in &cfg.gates {
            let kind = GateKind::from_name(name).ok_or_else(|| {
                NoiseError::Schema(format!("unknown gate kind `{name}` in noise config"))
            })?;
            let channel = spec.channel.as_ref().map(KrausSet::from_spec).transpose()?;
            if let Some(ch) = &channel {
                if ch.dim() == 4 && kind.n_qubits() != 2 {
                    return Err(NoiseError::Schema(format!(
                        "two-qubit channel attached to single-qubit gate `{name}`"
                    )));
                }
            }
            let slots = angle_slot_names(kind);
            let mut angle_errors = vec![None; slots.len()];
            for (angle_name, err) in &spec.angle_errors {
                let idx = slots.iter().position(|s| s == angle_name).ok_or_else(|| {
                    NoiseError::Schema(format!(
                        "gate `{name}` has no perturbable angle `{angle_name}` \
                         (angle errors apply to the native rotation gates)"
                    ))
                })?;
                if err.sigma_m < 0.0 || err.sigma_nm < 0.0 {
                    return Err(NoiseError::Param(format!(
                        "sigma_m/sigma_nm must be >= 0 for gate `{name}`"
                    )));
                }
                angle_errors[idx] = Some(*err);
            }
            let mut coherent = Vec::new();
            for co in &spec.coherent {
                let ckind = match co.gate.as_str() {
                    "rx" => GateKind::RX,
                    "ry" => GateKind::RY,
                    "rz" => GateKind::RZ,
                    other => {
                        return Err(NoiseError::Schema(format!(
                            "coherent error gate must be rx/ry/rz, got `{other}`"
                        )))
                    }
                };
                if !co.theta.is_finite() {
                    return Err(NoiseError::Param("coherent angle must be finite".into()));
                }
                coherent.push((ckind, co.theta));
            }
            per_gate.insert(
                kind,
                CompiledGateNoise {
                    channel,
                    angle_errors,
                    coherent,
                },
            );
        }

        let mut qubit_times = Vec::new();
        for (key, q) in &cfg.qubits {
            let idx: usize = key.parse().map_err(|_| {
                NoiseError::Schema(format!("qubit key `{key}` is not a decimal index"))
            })?;
            if !(q.t1 > 0.0) || !(q.t2 > 0.0) || q.t2 > 2.0 * q.t1 {
                return Err(NoiseError::Param(format!(
                    "qubit {idx}: need T1 > 0, T2 > 0 and T2 <= 2*T1, got T1={}, T2={}",
                    q.t1, q.t2
                )));
            }
            qubit_times.push((idx, q.t1, q.t2));
        }

        let mut idle = HashMap::new();
        for (name, &dur) in &cfg.durations {
            let op = match name.as_str() {
                "measure" => OpKey::Measure,
                "reset" => OpKey::Reset,
                gate => OpKey::Gate(GateKind::from_name(gate).ok_or_else(|| {
                    NoiseError::Schema(format!("unknown operation `{name}` in durations"))
                })?),
            };
            if !(dur >= 0.0) {
                return Err(NoiseError::Param(format!(
                    "duration of `{name}` must be >= 0, got {dur}"
                )));
            }
            if dur == 0.0 {
                continue;
            }
            for &(q, t1, t2) in &qubit_times {
                idle.insert((op, q), KrausSet::t1t2(t1, t2, dur)?);
            }
        }

        let spam = cfg.spam.unwrap_or_default();
        check_prob("spam prep", spam.prep)?;
        check_prob("spam readout", spam.readout)?;

        let has_angle_errors = per_gate.values().any(|g| {
            g.angle_errors.iter().any(|e| {
                e.map(|e| e.theta_c != 0.0 || e.sigma_m > 0.0 || e.sigma_nm > 0.0)
                    .unwrap_or(false)
            })
        });

        Ok(NoiseModel {
            per_gate,
            idle,
            spam_prep: spam.prep,
            spam_readout: spam.readout,
            has_angle_errors,
        })
    }

    /// True when the model perturbs nothing, so the noiseless fast path is
    /// exact.
    pub fn is_trivial(&self) -> bool {
        self.spam_prep == 0.0
            && self.spam_readout == 0.0
            && self.idle.is_empty()
            && !self.has_angle_errors
            && self
                .per_gate
                .values()
                .all(|g| g.channel.is_none() && g.coherent.is_empty())
    }

    pub fn spam_prep(&self) -> f64 {
        self.spam_prep
    }

    pub fn spam_readout(&self) -> f64 {
        self.spam_readout
    }

    /// Kraus channel attached to a gate kind, if any.
    pub fn gate_channel(&self, kind: GateKind) -> Option<&KrausSet> {
        self.per_gate.get(&kind).and_then(|g| g.channel.as_ref())
    }

    /// Coherent extra rotations attached to a gate kind.
    pub fn coherent(&self, kind: GateKind) -> &[(GateKind, f64)] {
        self.per_gate
            .get(&kind)
            .map(|g| g.coherent.as_slice())
            .unwrap_or(&[])
    }

    /// Idle decoherence channel for (operation, qubit), if configured.
    pub fn idle_channel(&self, op: OpKey, qubit: usize) -> Option<&KrausSet> {
        self.idle.get(&(op, qubit))
    }

    /// Perturbed angles for a native rotation application, or `None` when the
    /// kind has no angle errors configured.
    pub fn perturb_angles(
        &self,
        kind: GateKind,
        angles: &[f64],
        qubits: &[usize],
        ctx: &mut ShotContext,
    ) -> Option<Vec<f64>> {
        let gate = self.per_gate.get(&kind)?;
        if gate.angle_errors.iter().all(Option::is_none) {
            return None;
        }
        let sigmas_nm: Vec<f64> = gate
            .angle_errors
            .iter()
            .map(|e| e.map(|e| e.sigma_nm).unwrap_or(0.0))
            .collect();
        let drift = ctx.nonmarkov_draws(kind, qubits, &sigmas_nm).to_vec();
        Some(
            angles
                .iter()
                .enumerate()
                .map(|(slot, &theta)| match gate.angle_errors[slot] {
                    Some(err) => {
                        let jitter: f64 = if err.sigma_m > 0.0 {
                            err.sigma_m * ctx.rng.sample::<f64, _>(StandardNormal)
                        } else {
                            0.0
                        };
                        theta + err.theta_c + jitter + drift[slot]
                    }
                    None => theta,
                })
                .collect(),
        )
    }
}

/// Per-shot simulation context: the shot's RNG stream plus the cache of
/// non-Markovian angle drifts (one draw per (gate kind, qubit tuple) per
/// shot).
pub struct ShotContext {
    pub rng: ChaCha12Rng,
    nm_cache: HashMap<(GateKind, u64), Vec<f64>>,
}

impl ShotContext {
    pub fn new(rng: ChaCha12Rng) -> ShotContext {
        ShotContext {
            rng,
            nm_cache: HashMap::new(),
        }
    }

    fn nonmarkov_draws(&mut self, kind: GateKind, qubits: &[usize], sigmas: &[f64]) -> &[f64] {
        let key = (kind, pack_qubits(qubits));
        let rng = &mut self.rng;
        self.nm_cache.entry(key).or_insert_with(|| {
            sigmas
                .iter()
                .map(|&s| {
                    if s > 0.0 {
                        s * rng.sample::<f64, _>(StandardNormal)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
    }
}

fn pack_qubits(qubits: &[usize]) -> u64 {
    debug_assert!(qubits.len() <= 2);
    let mut key = 0u64;
    for (i, &q) in qubits.iter().enumerate() {
        key |= ((q as u64) + 1) << (32 * i);
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn all_channels_are_complete() {
        for set in [
            KrausSet::amplitude_damping(0.3).unwrap(),
            KrausSet::phase_damping(0.9).unwrap(),
            KrausSet::t1t2(50.0, 70.0, 13.0).unwrap(),
            KrausSet::depolarizing1(0.1).unwrap(),
            KrausSet::depolarizing2(0.2).unwrap(),
            KrausSet::pauli(0.1, 0.2, 0.3).unwrap(),
            KrausSet::readout_flip(0.05).unwrap(),
        ] {
            set.check_completeness(1e-12).unwrap();
        }
    }

    #[test]
    fn tphi_matches_closed_form() {
        // T1=50, T2=70 -> Tphi = 50*70/(2*50-70) = 3500/30
        assert_abs_diff_eq!(t_phi(50.0, 70.0), 3500.0 / 30.0, epsilon = 1e-9);
        assert!(t_phi(50.0, 100.0).is_infinite());
    }

    #[test]
    fn parameter_validation() {
        assert!(KrausSet::amplitude_damping(1.2).is_err());
        assert!(KrausSet::depolarizing1(-0.1).is_err());
        assert!(KrausSet::pauli(0.5, 0.4, 0.3).is_err());
        assert!(KrausSet::t1t2(50.0, 120.0, 1.0).is_err(), "T2 > 2*T1");
        assert!(KrausSet::t1t2(50.0, 100.0, 1.0).is_ok(), "T2 = 2*T1 is legal");
    }

    #[test]
    fn amplitude_damping_decays_excited_state() {
        let a = 0.3;
        let set = KrausSet::amplitude_damping(a).unwrap();
        let mut decayed = 0u32;
        let n = 20_000;
        let mut rng = stream_rng(99, 0);
        for _ in 0..n {
            let mut st = StateVector::new(1).unwrap();
            st.apply_x(0);
            let branch = apply_channel_stochastic(&mut st, &set, &[0], &mut rng).unwrap();
            if branch == 1 {
                decayed += 1;
            }
        }
        let freq = decayed as f64 / n as f64;
        // 5 sigma band around a
        let sigma = (a * (1.0 - a) / n as f64).sqrt();
        assert!((freq - a).abs() < 5.0 * sigma, "freq={freq}, expected ~{a}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"gates": {"u": {"chanel": {"type": "depolarizing1", "p": 0.1}}}}"#;
        assert!(matches!(NoiseModel::from_json(bad), Err(NoiseError::Schema(_))));
        let bad2 = r#"{"extra": 1}"#;
        assert!(matches!(NoiseModel::from_json(bad2), Err(NoiseError::Schema(_))));
    }

    #[test]
    fn valid_config_compiles() {
        let text = r#"{
            "gates": {
                "u": {"channel": {"type": "depolarizing1", "p": 0.01}},
                "cx": {"channel": {"type": "depolarizing2", "p": 0.02}},
                "rx": {"angle_errors": {"theta": {"theta_c": 0.01, "sigma_m": 0.02, "sigma_nm": 0.03}}},
                "rz": {"coherent": [{"gate": "rz", "theta": 0.005}]}
            },
            "qubits": {"0": {"T1": 50.0, "T2": 70.0}},
            "durations": {"cx": 0.2},
            "spam": {"prep": 0.01, "readout": 0.02}
        }"#;
        let model = NoiseModel::from_json(text).unwrap();
        assert!(!model.is_trivial());
        assert!(model.gate_channel(GateKind::U).is_some());
        assert!(model.gate_channel(GateKind::CX).is_some());
        assert!(model
            .idle_channel(OpKey::Gate(GateKind::CX), 0)
            .is_some());
        assert!(model.idle_channel(OpKey::Gate(GateKind::CX), 1).is_none());
        assert_abs_diff_eq!(model.spam_readout(), 0.02);
    }

    #[test]
    fn invalid_semantic_values_rejected() {
        let bad_gate = r#"{"gates": {"hadamard": {}}}"#;
        assert!(NoiseModel::from_json(bad_gate).is_err());
        let bad_p = r#"{"gates": {"u": {"channel": {"type": "depolarizing1", "p": 1.5}}}}"#;
        assert!(NoiseModel::from_json(bad_p).is_err());
        let bad_t2 = r#"{"qubits": {"0": {"T1": 50.0, "T2": 150.0}}}"#;
        assert!(NoiseModel::from_json(bad_t2).is_err());
        let angle_on_u =
            r#"{"gates": {"u": {"angle_errors": {"theta": {"sigma_m": 0.1}}}}}"#;
        assert!(NoiseModel::from_json(angle_on_u).is_err());
        let bad_2q = r#"{"gates": {"rx": {"channel": {"type": "depolarizing2", "p": 0.1}}}}"#;
        assert!(NoiseModel::from_json(bad_2q).is_err());
    }

    #[test]
    fn nonmarkov_draw_is_stable_within_shot() {
        let text = r#"{"gates": {"rx": {"angle_errors": {"theta": {"sigma_nm": 0.5}}}}}"#;
        let model = NoiseModel::from_json(text).unwrap();
        let mut ctx = ShotContext::new(stream_rng(3, 0));
        let a1 = model
            .perturb_angles(GateKind::RX, &[1.0], &[0], &mut ctx)
            .unwrap();
        let a2 = model
            .perturb_angles(GateKind::RX, &[1.0], &[0], &mut ctx)
            .unwrap();
        assert_eq!(a1, a2, "drift must be constant within a shot");
        let a_other = model
            .perturb_angles(GateKind::RX, &[1.0], &[1], &mut ctx)
            .unwrap();
        assert_ne!(a1, a_other, "different qubit tuple gets its own drift");

        // A fresh shot context redraws the drift.
        let mut ctx2 = ShotContext::new(stream_rng(3, 1));
        let b1 = model
            .perturb_angles(GateKind::RX, &[1.0], &[0], &mut ctx2)
            .unwrap();
        assert_ne!(a1, b1);
    }

    #[test]
    fn trivial_model_detection() {
        let model = NoiseModel::from_json("{}").unwrap();
        assert!(model.is_trivial());
        let spam = NoiseModel::from_json(r#"{"spam": {"readout": 0.01}}"#).unwrap();
        assert!(!spam.is_trivial());
    }
}
