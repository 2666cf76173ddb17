//! Monte Carlo check that event frequencies stay above the analytic bounds.
//!
//!     cargo run --example bound_validation

use std::f64::consts::FRAC_1_SQRT_2;

use sepkit::experiments::{run_bound_validation, BallCell, CubeCell, ValidationGrid};

fn main() -> sepkit::Result<()> {
    let grid = ValidationGrid {
        ball: vec![
            BallCell { n: 20, m: 100, r: 0.8 },
            BallCell { n: 50, m: 300, r: FRAC_1_SQRT_2 },
        ],
        cube: vec![CubeCell { n: 500, m: 200, delta: 0.5 }],
        ..ValidationGrid::default()
    };
    let report = run_bound_validation(&grid, 40, 1)?;
    println!("{:<6} {:<9} {:>5} {:>5} {:>9} {:>9} {:>9}  method", "dist", "event", "n", "M", "freq", "bound", "tol");
    for row in &report.rows {
        let d = &row.dominance;
        println!(
            "{:<6} {:<9} {:>5} {:>5} {:>9.4} {:>9.4} {:>9.4}  {:?}",
            row.distribution, row.event, row.n, row.m, d.frequency, d.bound, d.tolerance, d.method
        );
    }
    println!("pass: {}", report.pass);
    Ok(())
}
