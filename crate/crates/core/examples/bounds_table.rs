//! Closed-form separation bounds and maximal sample sizes, evaluated in log space.
//!
//!     cargo run --example bounds_table

use std::f64::consts::FRAC_1_SQRT_2;

use sepkit::bounds::{
    ball_angle, ball_max_m_pairwise, ball_max_m_simple, ball_max_m_single, ball_pairwise, ball_single,
    cube_max_m_pairwise, cube_max_m_single, cube_single_simplified, BallBoundParams,
};

fn main() -> sepkit::Result<()> {
    let r = FRAC_1_SQRT_2;
    println!("uniform ball, r = 1/sqrt(2), M = 1e6");
    println!("{:>6} {:>14} {:>14} {:>14}", "n", "single", "pairwise", "angle");
    for n in [20, 50, 100, 200, 500] {
        let p = BallBoundParams::new(n, 1e6, r)?;
        println!(
            "{n:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
            ball_single(&p).probability_lower_bound,
            ball_pairwise(&p).probability_lower_bound,
            ball_angle(&p).probability_lower_bound,
        );
    }

    // log-space keeps tiny complements
    let p = BallBoundParams::new(1000, 1e9, r)?;
    println!("\nn=1000, M=1e9: 1 - bound = {:e}", ball_pairwise(&p).complement());

    println!("\nmaximal M at theta = 0.01");
    for n in [50, 100, 200] {
        println!(
            "  ball n={n:<4} single {:.4e}  pairwise {:.4e}  simple {:.4e}",
            ball_max_m_single(n, r, 0.01)?.value,
            ball_max_m_pairwise(n, r, 0.01)?.value,
            ball_max_m_simple(n, r, 0.01)?.value,
        );
    }
    for n in [2000, 5000, 10_000] {
        println!(
            "  cube n={n:<5} single {:.4e}  pairwise {:.4e}",
            cube_max_m_single(n, 1.0 / 12.0, 0.01)?.value,
            cube_max_m_pairwise(n, 1.0 / 12.0, 0.01)?.value,
        );
    }

    let b = cube_single_simplified(5000, 20_000.0, 1.0 / 12.0)?;
    println!("\ncube n=5000, M=20000, sigma0^2=1/12: bound {:.8}", b.probability_lower_bound);
    Ok(())
}
