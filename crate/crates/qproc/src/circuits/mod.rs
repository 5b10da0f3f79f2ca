//! Benchmark and application circuit generators.
//!
//! * [`bernstein_vazirani`], [`grover`], [`ghz`], [`swap_test`] — textbook
//!   reference circuits (all multi-controlled gates are decomposed
//!   ancilla-free).
//! * [`QuboProblem`] with encoders from linear systems
//!   ([`qubo_from_linear_system`]) and ODE boundary-value problems
//!   ([`qubo_from_ode`]), plus [`qaoa_circuit`] / [`qaoa_energy`] /
//!   [`train_fixed_angles`] for fixed-angle QAOA.
//! * [`PauliHamiltonian`] with commuting-family grouping
//!   ([`group_commuting`]) and Suzuki-Trotter compilation
//!   ([`trotter_circuit`]).

mod algorithms;
mod pauli;
mod qaoa;
mod qubo;
mod trotter;

pub use algorithms::{bernstein_vazirani, ghz, grover, multi_controlled_phase, swap_test};
pub use pauli::{group_commuting, pauli_strings_commute_qubitwise, PauliHamiltonian};
pub use qaoa::{
    qaoa_circuit, qaoa_energy, train_fixed_angles, FixedAngles, TrainConfig, TrainResult,
    MAX_TRAIN_VARS,
};
pub use qubo::{
    qubo_from_linear_system, qubo_from_ode, BinaryEncoding, OdeProblem, QuboProblem,
    MAX_ENUMERATION_VARS,
};
pub use trotter::{suzuki_coefficient, trotter_circuit};

use thiserror::Error;

/// Circuit-generator failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitsError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("enumeration over {n} binary variables exceeds the guard of {max}")]
    TooManyVariables { n: usize, max: usize },
    #[error("simulation failed: {0}")]
    Sim(#[from] crate::sim::SimError),
}
