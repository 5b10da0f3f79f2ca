//! Matrix permanents via Ryser's formula with Gray-code subset enumeration.

use super::PhotonicError;
use crate::linalg::CMat;
use num_complex::Complex64;

/// Largest matrix size accepted; the O(n 2^n) cost doubles per row beyond
/// this point.
pub const MAX_PERMANENT_DIM: usize = 30;

/// Permanent of a square complex matrix in O(n 2^n) time and O(n) extra
/// space:
///
/// ```text
/// Per(A) = (-1)^n  sum_{S != 0} (-1)^{|S|} prod_i ( sum_{j in S} a_ij )
/// ```
///
/// Subsets are visited in Gray-code order so each step updates the row sums
/// by a single column add/subtract. The permanent of the empty matrix is 1.
pub fn permanent(a: &CMat) -> Result<Complex64, PhotonicError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(PhotonicError::Param(format!(
            "permanent needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n > MAX_PERMANENT_DIM {
        return Err(PhotonicError::PermanentTooLarge {
            n,
            max: MAX_PERMANENT_DIM,
        });
    }
    if n == 0 {
        return Ok(Complex64::ONE);
    }

    let mut row_sums = vec![Complex64::ZERO; n];
    let mut total = Complex64::ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next_gray = k ^ (k >> 1);
        let flipped = (gray ^ next_gray).trailing_zeros() as usize;
        if next_gray & (1 << flipped) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, flipped)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, flipped)];
            }
        }
        gray = next_gray;
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}
