//! Pauli-sum Hamiltonians and commuting-family grouping.

use super::CircuitsError;
use serde::{Deserialize, Serialize};

/// A Hamiltonian `H = sum_i h_i P_i` over Pauli strings of uniform length.
///
/// String convention matches [`crate::sim::StateVector::expectation_pauli`]:
/// the leftmost letter acts on qubit `n-1`, the rightmost on qubit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    terms: Vec<(f64, String)>,
    n_qubits: usize,
}

#[derive(Serialize, Deserialize)]
struct PauliJson {
    terms: Vec<(f64, String)>,
}

impl PauliHamiltonian {
    /// Builds a Hamiltonian, validating letters, uniform length and finite
    /// coefficients.
    pub fn new(terms: Vec<(f64, String)>) -> Result<PauliHamiltonian, CircuitsError> {
        let n_qubits = match terms.first() {
            Some((_, s)) => s.chars().count(),
            None => {
                return Err(CircuitsError::Param(
                    "Hamiltonian needs at least one term".into(),
                ))
            }
        };
        if n_qubits == 0 {
            return Err(CircuitsError::Param("Pauli strings must be nonempty".into()));
        }
        for (h, s) in &terms {
            if !h.is_finite() {
                return Err(CircuitsError::Param(format!(
                    "coefficient of `{s}` is not finite"
                )));
            }
            if s.chars().count() != n_qubits {
                return Err(CircuitsError::Param(format!(
                    "Pauli string `{s}` has length {}, expected {n_qubits}",
                    s.chars().count()
                )));
            }
            if let Some(bad) = s.chars().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
                return Err(CircuitsError::Param(format!(
                    "Pauli string `{s}` contains `{bad}`; allowed letters are I, X, Y, Z"
                )));
            }
        }
        Ok(PauliHamiltonian { terms, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, String)] {
        &self.terms
    }

    /// Parses `{"terms": [[coeff, "XZI..."], ...]}`.
    pub fn from_json(text: &str) -> Result<PauliHamiltonian, CircuitsError> {
        let parsed: PauliJson =
            serde_json::from_str(text).map_err(|e| CircuitsError::Json(e.to_string()))?;
        PauliHamiltonian::new(parsed.terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PauliJson {
            terms: self.terms.clone(),
        })
        .expect("Hamiltonian serializes")
    }
}

/// Qubit-wise commutation: at every position the letters are equal or at
/// least one is `I`. This is stricter than general commutation but lets a
/// family share one measurement/diagonalization basis.
pub fn pauli_strings_commute_qubitwise(a: &str, b: &str) -> bool {
    a.chars()
        .zip(b.chars())
        .all(|(x, y)| x == 'I' || y == 'I' || x == y)
}

/// Greedy coloring of the qubit-wise anticommutation graph: terms are scanned
/// in order and each joins the first family it commutes with entirely (a new
/// family otherwise). Returns term indices per family; the family count is at
/// most 1 + the maximum anticommutation degree.
pub fn group_commuting(h: &PauliHamiltonian) -> Vec<Vec<usize>> {
    let mut families: Vec<Vec<usize>> = Vec::new();
    for (idx, (_, s)) in h.terms().iter().enumerate() {
        let slot = families.iter().position(|fam| {
            fam.iter()
                .all(|&j| pauli_strings_commute_qubitwise(s, &h.terms()[j].1))
        });
        match slot {
            Some(f) => families[f].push(idx),
            None => families.push(vec![idx]),
        }
    }
    families
}
