//! Preparation and measurement designs for tomography.
//!
//! Measurements are factorized Pauli settings: every qubit is rotated into
//! the computational basis by a per-qubit unitary (`X` via the Hadamard,
//! `Y` via Hadamard after an inverse phase gate, `Z` untouched) and read
//! out. Preparations are factorized products of the four states
//! `|0>`, `|1>`, `|+>`, `|+i>`, which together span the single-qubit
//! operator space. In every label the leftmost character refers to qubit
//! `n-1`, matching the bitstring convention of measurement outcomes.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::linalg::CMat;

use super::TomoError;

/// Measurement-basis letters in design order.
pub const SETTING_LETTERS: [char; 3] = ['X', 'Y', 'Z'];
/// Preparation letters in design order.
pub const PREP_LETTERS: [char; 4] = ['0', '1', '+', 'i'];

/// Largest width for enumerating all `3^n` measurement settings.
const MAX_QST_DESIGN: usize = 12;
/// Largest width for enumerating all `12^n` preparation/setting pairs.
const MAX_QPT_DESIGN: usize = 5;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit rotation that maps the eigenbasis of the given Pauli to the
/// computational basis.
fn letter_rotation(letter: char) -> Result<CMat, TomoError> {
    let h = CMat::from_row_slice(
        2,
        2,
        &[
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
            c(-FRAC_1_SQRT_2, 0.0),
        ],
    );
    match letter {
        'X' => Ok(h),
        'Y' => {
            // H·S†: sends |+i> to |0> and |-i> to |1>.
            let s_dag = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
            Ok(h * s_dag)
        }
        'Z' => Ok(CMat::identity(2, 2)),
        other => Err(TomoError::Param(format!(
            "unknown measurement letter {other:?}; expected one of X/Y/Z"
        ))),
    }
}

/// Single-qubit preparation as a normalized state vector.
fn letter_state(letter: char) -> Result<[Complex64; 2], TomoError> {
    match letter {
        '0' => Ok([c(1.0, 0.0), c(0.0, 0.0)]),
        '1' => Ok([c(0.0, 0.0), c(1.0, 0.0)]),
        '+' => Ok([c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]),
        'i' => Ok([c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]),
        other => Err(TomoError::Param(format!(
            "unknown preparation letter {other:?}; expected one of 0/1/+/i"
        ))),
    }
}

fn enumerate_labels(n: usize, letters: &[char]) -> Vec<String> {
    let total = letters.len().pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut label = vec![' '; n];
        let mut rem = idx;
        for pos in (0..n).rev() {
            label[pos] = letters[rem % letters.len()];
            rem /= letters.len();
        }
        out.push(label.into_iter().collect());
    }
    out
}

/// All `3^n` factorized Pauli measurement settings for `n` qubits.
pub fn qst_design(n: usize) -> Result<Vec<String>, TomoError> {
    if n == 0 || n > MAX_QST_DESIGN {
        return Err(TomoError::Param(format!(
            "state-tomography designs support 1..={MAX_QST_DESIGN} qubits, got {n}"
        )));
    }
    Ok(enumerate_labels(n, &SETTING_LETTERS))
}

/// All `4^n x 3^n` preparation/measurement pairs for `n` qubits,
/// preparation-major.
pub fn qpt_design(n: usize) -> Result<Vec<(String, String)>, TomoError> {
    if n == 0 || n > MAX_QPT_DESIGN {
        return Err(TomoError::Param(format!(
            "process-tomography designs support 1..={MAX_QPT_DESIGN} qubits, got {n}"
        )));
    }
    let preps = enumerate_labels(n, &PREP_LETTERS);
    let settings = enumerate_labels(n, &SETTING_LETTERS);
    let mut out = Vec::with_capacity(preps.len() * settings.len());
    for p in &preps {
        for s in &settings {
            out.push((p.clone(), s.clone()));
        }
    }
    Ok(out)
}

/// The pre-measurement rotation for a setting label: the tensor product of
/// per-qubit rotations, leftmost letter acting on qubit `n-1`.
pub fn setting_unitary(label: &str) -> Result<CMat, TomoError> {
    if label.is_empty() {
        return Err(TomoError::Param("setting label must not be empty".into()));
    }
    let mut v = CMat::identity(1, 1);
    for letter in label.chars() {
        v = v.kronecker(&letter_rotation(letter)?);
    }
    Ok(v)
}

/// Density matrix of a factorized preparation label, leftmost letter on
/// qubit `n-1`.
pub fn prep_density(label: &str) -> Result<CMat, TomoError> {
    if label.is_empty() {
        return Err(TomoError::Param("preparation label must not be empty".into()));
    }
    let mut rho = CMat::identity(1, 1);
    for letter in label.chars() {
        let v = letter_state(letter)?;
        let mut dm = CMat::zeros(2, 2);
        for (r, vr) in v.iter().enumerate() {
            for (cc, vc) in v.iter().enumerate() {
                dm[(r, cc)] = vr * vc.conj();
            }
        }
        rho = rho.kronecker(&dm);
    }
    Ok(rho)
}

/// POVM effects of a setting, indexed by outcome: `E_i = V† |i><i| V` where
/// `V` is the setting rotation.
pub fn setting_effects(label: &str) -> Result<Vec<CMat>, TomoError> {
    let v = setting_unitary(label)?;
    let d = v.nrows();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let row = v.row(i).into_owned();
        out.push(row.adjoint() * row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs_diff};

    fn pauli(letter: char) -> CMat {
        match letter {
            'X' => CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            'Y' => CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
            'Z' => CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn design_sizes_match_widths() {
        assert_eq!(qst_design(1).unwrap().len(), 3);
        assert_eq!(qst_design(2).unwrap().len(), 9);
        assert_eq!(qpt_design(1).unwrap().len(), 12);
        assert_eq!(qpt_design(2).unwrap().len(), 144);
        assert!(qst_design(0).is_err());
        assert!(qpt_design(6).is_err());
    }

    #[test]
    fn design_order_is_letter_major() {
        let settings = qst_design(2).unwrap();
        assert_eq!(settings.first().unwrap(), "XX");
        assert_eq!(settings[1], "XY");
        assert_eq!(settings.last().unwrap(), "ZZ");
        let pairs = qpt_design(1).unwrap();
        assert_eq!(pairs[0], ("0".to_string(), "X".to_string()));
        assert_eq!(pairs[11], ("i".to_string(), "Z".to_string()));
    }

    #[test]
    fn rotations_map_pauli_eigenbasis_to_z() {
        for letter in SETTING_LETTERS {
            let v = letter_rotation(letter).unwrap();
            let rotated = &v * pauli(letter) * dagger(&v);
            assert!(
                max_abs_diff(&rotated, &pauli('Z')) < 1e-12,
                "setting {letter} does not diagonalize its Pauli"
            );
        }
    }

    #[test]
    fn preparations_span_the_operator_space() {
        // Gram matrix of the four single-qubit preparation densities under
        // the Hilbert-Schmidt inner product must be full rank.
        let states: Vec<CMat> = PREP_LETTERS
            .iter()
            .map(|&l| prep_density(&l.to_string()).unwrap())
            .collect();
        let mut gram = nalgebra::DMatrix::<f64>::zeros(4, 4);
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                gram[(a, b)] = (dagger(sa) * sb).trace().re;
            }
        }
        let svd = gram.svd(false, false);
        let min_sv = svd.singular_values.min();
        assert!(min_sv > 0.05, "smallest singular value {min_sv}");
    }

    #[test]
    fn effects_are_positive_and_complete() {
        for label in ["X", "Y", "Z", "XZ", "YY"] {
            let effects = setting_effects(label).unwrap();
            let d = 1 << label.len();
            assert_eq!(effects.len(), d);
            let mut sum = CMat::zeros(d, d);
            for e in &effects {
                assert!(max_abs_diff(e, &dagger(e)) < 1e-12);
                // Rank-one projector: E² = E.
                assert!(max_abs_diff(&(e * e), e) < 1e-12);
                sum += e;
            }
            assert!(max_abs_diff(&sum, &CMat::identity(d, d)) < 1e-12);
        }
    }

    #[test]
    fn z_effects_are_computational_projectors() {
        let effects = setting_effects("Z").unwrap();
        assert!((effects[0][(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(effects[0][(1, 1)].norm() < 1e-15);
        assert!((effects[1][(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn born_rule_against_direct_state_rotation() {
        // P(outcome i | setting) computed from effects must match
        // |<i| V |psi>|^2 for a fixed state.
        let psi = CMat::from_row_slice(2, 1, &[c(0.8, 0.0), c(0.0, 0.6)]);
        let rho = &psi * psi.adjoint();
        for label in ["X", "Y", "Z"] {
            let v = setting_unitary(label).unwrap();
            let effects = setting_effects(label).unwrap();
            let rotated = &v * &psi;
            for (i, e) in effects.iter().enumerate() {
                let via_effect = (e * &rho).trace().re;
                let direct = rotated[(i, 0)].norm_sqr();
                assert!((via_effect - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_letters_are_rejected() {
        assert!(matches!(setting_unitary("Q"), Err(TomoError::Param(_))));
        assert!(matches!(prep_density("2"), Err(TomoError::Param(_))));
        assert!(setting_unitary("").is_err());
        assert!(prep_density("").is_err());
    }
}
