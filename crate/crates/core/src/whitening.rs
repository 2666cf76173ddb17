//! Mahalanobis whitening from the empirical covariance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, SampleSet};

/// Condition number above which [`LambdaPolicy::Auto`] regularizes.
pub const AUTO_CONDITION_LIMIT: f64 = 1e12;
/// Ridge used by [`LambdaPolicy::Auto`], relative to `trace(S) / n`.
pub const AUTO_RIDGE_SCALE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "lambda", rename_all = "snake_case")]
pub enum LambdaPolicy {
    /// No ridge; a singular covariance is an error.
    Forbid,
    /// `lambda = 1e-6 trace(S) / n` when the condition estimate exceeds `1e12`.
    #[default]
    Auto,
    Fixed(f64),
}

/// `z = F^T (x - mean)` with `F F^T = (S + lambda I)^{-1}`, `F` lower triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct WhiteningTransform {
    mean: Point,
    factor: DMatrix<f64>,
    lambda: f64,
    condition_estimate: f64,
}

impl WhiteningTransform {
    /// Centering only: `F = I`.
    pub fn identity(mean: Point) -> Self {
        let n = mean.dim();
        WhiteningTransform {
            mean,
            factor: DMatrix::identity(n, n),
            lambda: 0.0,
            condition_estimate: 1.0,
        }
    }

    /// Rebuilds a transform from stored parts (e.g. a deserialized corrector).
    pub fn from_parts(mean: Point, factor: DMatrix<f64>, lambda: f64, condition_estimate: f64) -> Result<Self> {
        let n = mean.dim();
        if factor.nrows() != n || factor.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: factor.nrows(),
            });
        }
        Ok(WhiteningTransform {
            mean,
            factor,
            lambda,
            condition_estimate,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.dim()
    }

    pub fn mean(&self) -> &Point {
        &self.mean
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let centered = DVector::from_iterator(x.len(), x.iter().zip(self.mean.coords()).map(|(a, m)| a - m));
        Ok((self.factor.transpose() * centered).as_slice().to_vec())
    }

    /// Whitens every point; output is row-major like [`SampleSet::as_slice`].
    pub fn apply_all(&self, sample: &SampleSet) -> Result<Vec<f64>> {
        let n = self.dim();
        if sample.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: sample.dim(),
            });
        }
        let mut centered = sample.as_slice().to_vec();
        for row in centered.chunks_exact_mut(n) {
            row.iter_mut().zip(self.mean.coords()).for_each(|(a, m)| *a -= m);
        }
        // row-major M x n is column-major n x M
        let cols = DMatrix::from_vec(n, sample.len(), centered);
        let z = self.factor.transpose() * cols;
        Ok(z.as_slice().to_vec())
    }

    /// Relative residual `|F F^T (S + lambda I) - I|_F / sqrt(n)`.
    pub fn reconstruction_residual(&self, covariance: &DMatrix<f64>) -> f64 {
        let n = self.dim();
        let reg = covariance + DMatrix::identity(n, n) * self.lambda;
        let prod = &self.factor * self.factor.transpose() * reg;
        (prod - DMatrix::identity(n, n)).norm() / (n as f64).sqrt()
    }
}

/// Unbiased empirical covariance and mean.
pub fn covariance(sample: &SampleSet) -> Result<(Point, DMatrix<f64>)> {
    let m = sample.len();
    let n = sample.dim();
    if m < 2 {
        return Err(Error::InsufficientData(format!("covariance needs at least 2 points, got {m}")));
    }
    let mut mean = vec![0.0; n];
    for row in sample.points() {
        mean.iter_mut().zip(row).for_each(|(a, x)| *a += x);
    }
    mean.iter_mut().for_each(|a| *a /= m as f64);
    let mut centered = sample.as_slice().to_vec();
    for row in centered.chunks_exact_mut(n) {
        row.iter_mut().zip(&mean).for_each(|(a, mu)| *a -= mu);
    }
    let x = DMatrix::from_vec(n, m, centered);
    let s = (&x * x.transpose()) / (m - 1) as f64;
    Ok((Point::new(mean)?, s))
}

fn condition(s: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(s.clone());
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || max <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Builds the whitening transform of `sample` under `policy`.
pub fn whiten(sample: &SampleSet, policy: LambdaPolicy) -> Result<WhiteningTransform> {
    let (mean, s) = covariance(sample)?;
    whiten_covariance(mean, &s, policy)
}

pub fn whiten_covariance(mean: Point, s: &DMatrix<f64>, policy: LambdaPolicy) -> Result<WhiteningTransform> {
    let n = s.nrows();
    let condition_estimate = condition(s);
    let lambda = match policy {
        LambdaPolicy::Forbid => 0.0,
        LambdaPolicy::Fixed(l) => {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidArgument(format!("lambda = {l} must be finite and >= 0")));
            }
            l
        }
        LambdaPolicy::Auto => {
            if condition_estimate > AUTO_CONDITION_LIMIT {
                let trace = s.trace();
                if trace <= 0.0 {
                    return Err(Error::SingularCovariance);
                }
                AUTO_RIDGE_SCALE * trace / n as f64
            } else {
                0.0
            }
        }
    };
    if lambda == 0.0 && !condition_estimate.is_finite() {
        return Err(Error::SingularCovariance);
    }
    let reg = s + DMatrix::identity(n, n) * lambda;
    let chol = reg.cholesky().ok_or(Error::SingularCovariance)?;
    let inverse = chol.inverse();
    // symmetrize before the second factorization
    let inverse = (&inverse + inverse.transpose()) * 0.5;
    let factor = inverse.cholesky().ok_or(Error::SingularCovariance)?.unpack();
    Ok(WhiteningTransform {
        mean,
        factor,
        lambda,
        condition_estimate,
    })
}
