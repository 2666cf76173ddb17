//! How many i.i.d. points of the 100-dimensional unit ball are all vertices
//! of their convex hull with probability 0.99?
//!
//!     cargo run --example max_m

use sepkit::experiments::run_max_m_example;

fn main() -> sepkit::Result<()> {
    let report = run_max_m_example()?;
    println!("n = {}, r = {:.6}, theta = {}", report.n, report.r, report.theta);
    println!("max M (simple condition) = {:.2}, floor {}", report.max_m.value, report.max_m.floor);
    println!("below {}: {}", report.max_m_ceiling, report.max_m.floor < report.max_m_ceiling);
    println!(
        "pairwise bound at M = {:.1e}: {:.6}",
        report.m_checked, report.bound_at_m_checked.probability_lower_bound
    );
    println!("pass: {}", report.pass);
    Ok(())
}
