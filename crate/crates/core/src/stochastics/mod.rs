//! Deterministic randomness and dense linear algebra.

mod linalg;
mod rng;

pub use linalg::{cholesky_psd, Cholesky, DenseMatrix, JitterPolicy, JITTER_LADDER};
pub use rng::{sample_standard_normal, RngState};

use crate::error::{Error, Result};

/// Draws `mean + L z` where `L Lᵀ = cov` and `z` is a standard-normal vector.
///
/// Covariances are factorized with [`JitterPolicy::SemiDefinite`], so rank
/// deficient matrices (duplicate grid points, zero covariance) produce
/// exactly correlated or exactly constant coordinates.
pub fn sample_mvn(mean: &[f64], cov: &DenseMatrix, rng: &mut RngState) -> Result<Vec<f64>> {
    if cov.rows() != mean.len() || cov.cols() != mean.len() {
        return Err(Error::Dimension {
            expected: mean.len(),
            got: cov.rows(),
        });
    }
    let factor = cholesky_psd(cov, JitterPolicy::SemiDefinite)?;
    Ok(sample_mvn_factored(mean, &factor, rng))
}

/// Same as [`sample_mvn`] with a precomputed factor.
pub fn sample_mvn_factored(mean: &[f64], factor: &Cholesky, rng: &mut RngState) -> Vec<f64> {
    let z: Vec<f64> = (0..mean.len()).map(|_| rng.standard_normal()).collect();
    let l = factor.lower();
    mean.iter()
        .enumerate()
        .map(|(i, &m)| m + (0..=i).map(|j| l.get(i, j) * z[j]).sum::<f64>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_covariance_returns_mean() {
        let mut rng = RngState::new(3);
        let x = sample_mvn(&[1.0, 2.0], &DenseMatrix::zeros(2, 2), &mut rng).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn rank_one_components_agree() {
        let cov = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let mut rng = RngState::new(11);
        for _ in 0..1000 {
            let x = sample_mvn(&[0.0, 0.0], &cov, &mut rng).unwrap();
            assert_eq!(x[0], x[1]);
        }
    }

    #[test]
    fn identity_component_means() {
        let cov = DenseMatrix::identity(2);
        let mut rng = RngState::new(5);
        let n = 100_000;
        let mut sums = [0.0; 2];
        for _ in 0..n {
            let x = sample_mvn(&[0.0, 0.0], &cov, &mut rng).unwrap();
            sums[0] += x[0];
            sums[1] += x[1];
        }
        for s in sums {
            assert!((s / n as f64).abs() < 0.02);
        }
    }

    #[test]
    fn indefinite_covariance_rejected() {
        let cov = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let mut rng = RngState::new(1);
        assert!(matches!(
            sample_mvn(&[0.0, 0.0], &cov, &mut rng),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn dimension_checked() {
        let mut rng = RngState::new(1);
        assert!(matches!(
            sample_mvn(&[0.0], &DenseMatrix::identity(2), &mut rng),
            Err(Error::Dimension { .. })
        ));
    }
}
