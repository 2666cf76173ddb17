//! Exact extreme-point test by linear feasibility: a separating functional or
//! a convex-combination certificate.
//!
//!     cargo run --example oracle_certificate

use sepkit::geometry::DistributionSpec;
use sepkit::separability::{oracle_check, sample_from, OracleVerdict};

fn main() -> sepkit::Result<()> {
    let pts: [&[f64]; 5] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[0.5, 0.5]];
    let s = sample_from(&pts, DistributionSpec::UnitCube)?;
    for i in 0..s.len() {
        match oracle_check(&s, i)? {
            OracleVerdict::Separable { functional } => {
                println!(
                    "{:?}: extreme, w = {:?}, offset {:.3}",
                    s.point(i),
                    functional.weights(),
                    functional.offset()
                );
            }
            OracleVerdict::NotSeparable { coefficients, residual } => {
                println!("{:?}: interior, coefficients {coefficients:?}, residual {residual:.1e}", s.point(i));
            }
        }
    }
    Ok(())
}
