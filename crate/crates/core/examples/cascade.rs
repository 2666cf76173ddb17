//! Two-neuron separability: the bound, and an explicit separator built on a sample.
//!
//!     cargo run --example cascade

use sepkit::experiments::run_cascade_examples;
use sepkit::geometry::sample_ball;
use sepkit::separability::{cascade_report, cascade_separate, check_point_separable, check_probes, PointCheck};

fn main() -> sepkit::Result<()> {
    for case in run_cascade_examples()?.cases {
        println!("n={} M={:.3e}: theta = {:.4e}  ceiling {:?}", case.n, case.m, case.theta, case.ceiling);
    }

    // moderate dimension: the radial hyperplane alone often leaves a few violators
    let (n, m, r) = (20, 2000, 0.7);
    let s = sample_ball(n, m, 5)?;
    let mut shown = false;
    for i in 0..s.len() {
        let single = check_point_separable(&s, i, PointCheck::PairwiseR(r))?;
        if single.separable || shown {
            continue;
        }
        if let Ok(sep) = cascade_separate(&s, i, r) {
            println!(
                "\npoint {i}: radial test fails with {} violators; second neuron w = {:.3?}",
                single.violator_count,
                sep.second.weights()
            );
            shown = true;
        }
    }
    let probes: Vec<usize> = (0..s.len()).collect();
    let report = cascade_report(&s, &probes, r)?;
    println!("cascade-separable fraction at n={n}, M={m}: {:.3}", report.fraction_separable);
    let radial = check_probes(&s, &probes, PointCheck::PairwiseR(r))?;
    println!("radial-only fraction:                     {:.3}", radial.fraction_separable);
    Ok(())
}
