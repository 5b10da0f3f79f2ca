//! Photonic-hardware simulation: sparse Fock-space states with linear
//! optics, loss and dark counts; a post-selected linear-optical CNOT; and
//! exact boson sampling via the Clifford-Clifford algorithm with Gray-code
//! permanents.

mod fock;
mod klm;
mod permanent;
mod sampler;

pub use fock::FockState;
pub use klm::{apply_klm_cnot, klm_cnot_demo, klm_cnot_input, KlmDemo, KlmInputStats};
pub use permanent::{permanent, MAX_PERMANENT_DIM};
pub use sampler::{
    bs_probability, bs_sample, occupation_to_string, BsNoise, Interferometer,
    MAX_SAMPLER_PHOTONS,
};

use thiserror::Error;

/// Photonic-engine failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhotonicError {
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("total photon number {total} exceeds the ceiling {ceiling}")]
    CeilingExceeded { total: u32, ceiling: u32 },
    #[error("matrix is not unitary within 1e-8")]
    NotUnitary,
    #[error("photon number mismatch: input has {input}, output has {output}")]
    PhotonMismatch { input: u32, output: u32 },
    #[error("matrix size {n} exceeds the permanent guard of {max}")]
    PermanentTooLarge { n: usize, max: usize },
    #[error("invalid photonic parameter: {0}")]
    Param(String),
}
