//! Small dense complex-matrix helpers shared across modules.
//!
//! The state-vector and Fock engines use hand-rolled kernels for speed; the
//! tomography, benchmarking and interferometer code paths work with explicit
//! [`nalgebra`] matrices. This module collects the conversions and
//! constructions they share.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Dense complex matrix used throughout the higher-level modules.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Frobenius distance `max |(A - B)_ij|` between equally-shaped matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Checks `U U† = I` to within `tol` (max absolute entry deviation).
pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let d = u.nrows();
    let prod = u * dagger(u);
    let eye = CMat::identity(d, d);
    max_abs_diff(&prod, &eye) <= tol
}

/// Largest singular value (spectral norm). Panics if SVD fails to converge.
pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .expect("SVD did not converge")
        .singular_values
        .max()
}

/// Haar-distributed `m x m` unitary: QR of a complex Gaussian matrix with the
/// R-diagonal phase correction that makes the distribution exactly Haar.
pub fn haar_unitary<R: Rng>(m: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed special unitary: [`haar_unitary`] rescaled to det 1.
pub fn haar_special_unitary<R: Rng>(m: usize, rng: &mut R) -> CMat {
    let u = haar_unitary(m, rng);
    let det = u.determinant();
    let phase = (-det.arg() / m as f64) * Complex64::i();
    u * phase.exp()
}

/// One complex number in the on-disk JSON representation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Converts a matrix to row-major nested JSON values.
pub fn matrix_to_json(m: &CMat) -> Vec<Vec<ComplexJson>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

/// Rebuilds a matrix from row-major nested JSON values.
///
/// Returns `None` when the rows are ragged or empty.
pub fn matrix_from_json(rows: &[Vec<ComplexJson>]) -> Option<CMat> {
    let nrows = rows.len();
    let ncols = rows.first()?.len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(CMat::from_fn(nrows, ncols, |i, j| rows[i][j].into()))
}
