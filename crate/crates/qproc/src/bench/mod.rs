//! Device-level figures of merit: distribution fidelity, heavy-output
//! statistics, randomized benchmarking ([`rb_experiment`]) and quantum
//! volume ([`qv_experiment`]).

mod qv;
mod rb;

pub use qv::{qv_experiment, QvRecord, QvResult};
pub use rb::{rb_experiment, RbFit, RbResult, CLIFFORD_COUNT};

use thiserror::Error;

/// Benchmarking failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("distribution lengths differ: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("distribution sums to {sum}, more than 1e-6 away from 1")]
    NotNormalized { sum: f64 },
    #[error("heavy-output radicand is negative ({value}): inconsistent counts")]
    NegativeRadicand { value: f64 },
    #[error("decay fit failed (singular or non-finite); raw survival data retained")]
    FitFailure {
        lengths: Vec<usize>,
        survival: Vec<f64>,
    },
    #[error("simulation failed: {0}")]
    Sim(#[from] crate::sim::SimError),
    #[error("noise application failed: {0}")]
    Noise(#[from] crate::noise::NoiseError),
}

/// Classical (Bhattacharyya) fidelity between two probability
/// distributions: `F(p, q) = (sum_m sqrt(p_m q_m))^2`. Symmetric, in
/// [0, 1], and 1 exactly when `p = q`.
pub fn fidelity(p: &[f64], q: &[f64]) -> Result<f64, BenchError> {
    if p.len() != q.len() {
        return Err(BenchError::LengthMismatch {
            a: p.len(),
            b: q.len(),
        });
    }
    for dist in [p, q] {
        if dist.iter().any(|&x| !x.is_finite() || x < -1e-9) {
            return Err(BenchError::Param(
                "distribution entries must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(BenchError::NotNormalized { sum });
        }
    }
    let bc: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    Ok((bc * bc).min(1.0))
}

/// Heavy-output estimator with an explicit deviation factor:
/// `(n_h - factor * sqrt(n_h (n_s - n_h/n_c))) / (n_c n_s)`. The default
/// protocol ([`h_est`]) uses `factor = 1`; the conventional two-sigma
/// variant uses `factor = 2`.
pub fn h_est_with_deviation(
    n_h: u64,
    n_c: u64,
    n_s: u64,
    factor: f64,
) -> Result<f64, BenchError> {
    if n_c == 0 || n_s == 0 {
        return Err(BenchError::Param(
            "circuit and shot counts must be positive".into(),
        ));
    }
    if !(factor >= 0.0) {
        return Err(BenchError::Param(format!(
            "deviation factor must be non-negative, got {factor}"
        )));
    }
    let (nh, nc, ns) = (n_h as f64, n_c as f64, n_s as f64);
    let radicand = nh * (ns - nh / nc);
    if radicand < 0.0 {
        return Err(BenchError::NegativeRadicand { value: radicand });
    }
    Ok((nh - factor * radicand.sqrt()) / (nc * ns))
}

/// One-sided-deviation heavy-output estimate
/// `(n_h - sqrt(n_h (n_s - n_h/n_c))) / (n_c n_s)` from `n_h` heavy hits
/// over `n_c` circuits at `n_s` shots each. A negative radicand (possible
/// only when `n_h > n_c * n_s`) is rejected as inconsistent counts.
pub fn h_est(n_h: u64, n_c: u64, n_s: u64) -> Result<f64, BenchError> {
    h_est_with_deviation(n_h, n_c, n_s, 1.0)
}

/// Indices whose probability strictly exceeds the median of `ideal`
/// (median = midpoint of the two central order statistics for even
/// lengths). Ties with the median are excluded.
pub fn heavy_set(ideal: &[f64]) -> Vec<usize> {
    if ideal.is_empty() {
        return Vec::new();
    }
    let m = median(ideal);
    (0..ideal.len()).filter(|&i| ideal[i] > m).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn fidelity_examples() {
        assert_abs_diff_eq!(
            fidelity(&[0.5, 0.5], &[0.5, 0.5]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            fidelity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let f = fidelity(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        let expected = (0.125f64.sqrt() + 0.375f64.sqrt()).powi(2);
        assert_abs_diff_eq!(f, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(f, 0.93301, epsilon = 5e-6);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..20 {
            let mut p: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            let mut q: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            let (sp, sq) = (p.iter().sum::<f64>(), q.iter().sum::<f64>());
            p.iter_mut().for_each(|x| *x /= sp);
            q.iter_mut().for_each(|x| *x /= sq);
            let f = fidelity(&p, &q).unwrap();
            assert_abs_diff_eq!(f, fidelity(&q, &p).unwrap(), epsilon = 1e-14);
            assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn fidelity_validation() {
        assert!(matches!(
            fidelity(&[1.0], &[0.5, 0.5]),
            Err(BenchError::LengthMismatch { a: 1, b: 2 })
        ));
        assert!(matches!(
            fidelity(&[0.7, 0.7], &[0.5, 0.5]),
            Err(BenchError::NotNormalized { .. })
        ));
        assert!(fidelity(&[-0.1, 1.1], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn h_est_examples() {
        assert_abs_diff_eq!(h_est(0, 100, 100).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h_est(10_000, 100, 100).unwrap(), 1.0, epsilon = 1e-15);
        let h = h_est(7000, 100, 100).unwrap();
        assert_abs_diff_eq!(h, (7000.0 - 210_000.0f64.sqrt()) / 1e4, epsilon = 1e-15);
        assert_abs_diff_eq!(h, 0.65417, epsilon = 1e-5);
        // n_h beyond n_c*n_s is the only way the radicand goes negative.
        assert!(matches!(
            h_est(10_001, 100, 100),
            Err(BenchError::NegativeRadicand { .. })
        ));
        assert!(h_est(1, 0, 100).is_err());
        // The conventional two-sigma variant is strictly more conservative.
        let h2 = h_est_with_deviation(7000, 100, 100, 2.0).unwrap();
        assert!(h2 < h);
    }

    #[test]
    fn heavy_set_examples() {
        assert!(heavy_set(&[0.25; 4]).is_empty());
        assert_eq!(heavy_set(&[0.7, 0.1, 0.1, 0.1]), vec![0]);
        assert!(heavy_set(&[]).is_empty());
    }

    #[test]
    fn heavy_set_matches_naive_oracle() {
        let mut rng = stream_rng(9, 0);
        for _ in 0..10 {
            let mut p: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            // Independent median: sort and average the 4th/5th order stats.
            let mut sorted = p.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = 0.5 * (sorted[3] + sorted[4]);
            let naive: Vec<usize> = (0..8).filter(|&i| p[i] > med).collect();
            assert_eq!(heavy_set(&p), naive);
            // Sanity: heavy mass of a distinct-valued distribution is >= 1/2.
            let mass: f64 = heavy_set(&p).iter().map(|&i| p[i]).sum();
            assert!(mass >= 0.5);
        }
    }
}
