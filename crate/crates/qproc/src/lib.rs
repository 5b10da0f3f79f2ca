//! Emulation and benchmarking toolkit for small gate-based quantum processors.
//!
//! The crate models two hardware families end to end:
//!
//! * **Qubit processors** — an OpenQASM 2.0 front end ([`qasm`]) over a dense
//!   state-vector engine ([`sim`]) with stochastic Kraus-trajectory noise,
//!   angle-error models and SPAM errors ([`noise`]).
//! * **Photonic processors** — a sparse Fock-space engine with phase shifters,
//!   beamsplitters, loss and dark counts, post-selected linear-optical logic,
//!   and an exact single-photon boson sampler ([`photonic`]).
//!
//! On top of the engines sit device-characterization tools:
//!
//! * [`bench`] — distribution fidelity, randomized benchmarking and
//!   quantum-volume experiments.
//! * [`tomo`] — maximum-likelihood state, process, detector and Hamiltonian
//!   tomography.
//! * [`circuits`] — reference circuit generators (Bernstein-Vazirani, Grover,
//!   GHZ, swap test), QAOA with QUBO encoders for linear systems and ODE
//!   boundary-value problems, and Suzuki-Trotter compilation of Pauli
//!   Hamiltonians.
//!
//! Everything is deterministic under a caller-supplied 64-bit seed: repeated
//! runs with the same inputs produce identical outputs regardless of thread
//! count or execution schedule.
//!
//! # Example
//!
//! ```
//! use qproc::qasm::Circuit;
//! use qproc::sim;
//!
//! // A two-qubit Bell circuit, sampled 1000 times.
//! let mut c = Circuit::new(2, 2);
//! c.u(0, std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::PI); // Hadamard
//! c.cx(0, 1);
//! c.measure(0, 0);
//! c.measure(1, 1);
//! let hist = sim::sample(&c, 1000, 7, None).unwrap();
//! assert_eq!(hist.total(), 1000);
//! assert_eq!(hist.counts.get("00").copied().unwrap_or(0)
//!          + hist.counts.get("11").copied().unwrap_or(0), 1000);
//! ```

#![forbid(unsafe_code)]

pub mod bench;
pub mod circuits;
pub mod linalg;
pub mod noise;
pub mod photonic;
pub mod qasm;
pub mod rng;
pub mod sim;
pub mod tomo;

pub use qasm::{Circuit, GateKind, Instruction};
pub use sim::{CountsHistogram, StateVector};
