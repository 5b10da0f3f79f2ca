//! Tomographic reconstruction of states, processes, detectors, and
//! effective Hamiltonians from measurement counts.
//!
//! Reconstruction runs in two stages: a least-squares linear inversion of
//! the observed frequencies provides the starting point, which is then
//! refined by maximum-likelihood estimation under a root parameterization
//! `X = cc†` that keeps every iterate positive semidefinite. Trace,
//! trace-preservation, and completeness constraints are restored by
//! projection after every accepted gradient step.

mod design;
mod mle;
mod qht;

pub use design::{
    prep_density, qpt_design, qst_design, setting_effects, setting_unitary, PREP_LETTERS,
    SETTING_LETTERS,
};
pub use mle::{
    entanglement_fidelity, fidelity_to_target, qdt_mle, qpt_mle, qst_mle, DetectorEstimate,
    MleOptions, MleReport, ProcessEstimate, StateEstimate,
};
pub use qht::{choi_of_unitary, qht_extract, QhtResult};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced by tomography routines.
#[derive(Debug, Error)]
pub enum TomoError {
    /// Invalid parameter or unsupported problem size.
    #[error("invalid parameter: {0}")]
    Param(String),
    /// Malformed dataset contents.
    #[error("invalid dataset: {0}")]
    Dataset(String),
    /// Malformed JSON input.
    #[error("invalid JSON: {0}")]
    Json(String),
    /// The measurement design does not determine the object: the linear
    /// map from parameters to probabilities is rank-deficient.
    #[error(
        "design is not informationally complete: rank {rank} of {needed} parameters"
    )]
    NotInformationallyComplete { rank: usize, needed: usize },
    /// Mismatched matrix or vector dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// One group of measurement counts: an optional preparation label, an
/// optional measurement-setting label, and outcome counts keyed by
/// classical bitstring (qubit `n-1` leftmost).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoRecord {
    /// Preparation label over `0`, `1`, `+`, `i` (qubit `n-1` leftmost).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prep: Option<String>,
    /// Measurement-setting label over `X`, `Y`, `Z` (qubit `n-1` leftmost).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<String>,
    /// Outcome counts keyed by bitstring.
    pub counts: BTreeMap<String, u64>,
}

/// A tomography dataset: qubit count plus measurement records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TomoDataset {
    n_qubits: usize,
    records: Vec<TomoRecord>,
}

impl TomoDataset {
    /// Validate labels and outcome keys and assemble a dataset.
    pub fn new(n_qubits: usize, records: Vec<TomoRecord>) -> Result<TomoDataset, TomoError> {
        if n_qubits == 0 {
            return Err(TomoError::Param("n_qubits must be at least 1".into()));
        }
        for (idx, rec) in records.iter().enumerate() {
            if let Some(p) = &rec.prep {
                if p.chars().count() != n_qubits
                    || !p.chars().all(|ch| PREP_LETTERS.contains(&ch))
                {
                    return Err(TomoError::Dataset(format!(
                        "record {idx}: preparation label {p:?} is not {n_qubits} \
                         characters over 0/1/+/i"
                    )));
                }
            }
            if let Some(s) = &rec.setting {
                if s.chars().count() != n_qubits
                    || !s.chars().all(|ch| SETTING_LETTERS.contains(&ch))
                {
                    return Err(TomoError::Dataset(format!(
                        "record {idx}: setting label {s:?} is not {n_qubits} \
                         characters over X/Y/Z"
                    )));
                }
            }
            for key in rec.counts.keys() {
                if key.len() != n_qubits || !key.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(TomoError::Dataset(format!(
                        "record {idx}: outcome key {key:?} is not a {n_qubits}-bit string"
                    )));
                }
            }
        }
        Ok(TomoDataset { n_qubits, records })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn records(&self) -> &[TomoRecord] {
        &self.records
    }

    /// Parse a dataset from a JSON array of records. The qubit count is
    /// inferred from the first label or outcome key present.
    pub fn from_json(text: &str) -> Result<TomoDataset, TomoError> {
        let records: Vec<TomoRecord> =
            serde_json::from_str(text).map_err(|e| TomoError::Json(e.to_string()))?;
        let n_qubits = records
            .iter()
            .find_map(|r| {
                r.setting
                    .as_ref()
                    .map(|s| s.chars().count())
                    .or_else(|| r.prep.as_ref().map(|p| p.chars().count()))
                    .or_else(|| r.counts.keys().next().map(|k| k.len()))
            })
            .ok_or_else(|| {
                TomoError::Dataset("dataset contains no records with labels or counts".into())
            })?;
        TomoDataset::new(n_qubits, records)
    }

    /// Serialize the records as a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records)
            .expect("TomoDataset serialization cannot fail")
    }

    /// Index of an outcome bitstring (leftmost character is qubit `n-1`).
    #[cfg(test)]
    pub(crate) fn outcome_index(&self, key: &str) -> usize {
        key.bytes().fold(0usize, |acc, b| (acc << 1) | usize::from(b == b'1'))
    }
}
