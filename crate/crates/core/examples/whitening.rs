//! Mahalanobis whitening of a stretched, correlated cloud.
//!
//!     cargo run --example whitening

use sepkit::geometry::{sample_cube, DistributionSpec, SampleSet};
use sepkit::whitening::{covariance, whiten, LambdaPolicy};

fn main() -> sepkit::Result<()> {
    let base = sample_cube(3, 50_000, 4)?;
    let rows: Vec<f64> = base
        .points()
        .flat_map(|p| [p[0], 10.0 * p[1] + p[0], 0.1 * p[2]])
        .collect();
    let s = SampleSet::from_rows(rows, 3, DistributionSpec::UnitCube, 4)?;
    let (_, cov) = covariance(&s)?;
    println!("covariance before:{cov:.4}");

    let w = whiten(&s, LambdaPolicy::Auto)?;
    println!("condition estimate {:.3e}, lambda {}", w.condition_estimate(), w.lambda());
    let z = SampleSet::from_rows(w.apply_all(&s)?, 3, DistributionSpec::UnitCube, 4)?;
    let (_, white) = covariance(&z)?;
    println!("covariance after:{white:.6}");
    println!("reconstruction residual {:.2e}", w.reconstruction_residual(&cov));

    // fewer points than dimensions: the covariance is singular
    let thin = sample_cube(20, 10, 1)?;
    assert!(whiten(&thin, LambdaPolicy::Forbid).is_err());
    println!("rank-deficient sample: ridge lambda = {:.3e}", whiten(&thin, LambdaPolicy::Auto)?.lambda());
    Ok(())
}
