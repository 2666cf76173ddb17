//! Seeded samplers for the three distribution families, plus the on-disk formats.
//!
//!     cargo run --example sampling

use sepkit::geometry::{
    empirical_mean_and_r0, sample_ball, sample_cube, sample_product, CoordinateGenerator, DistributionSpec,
    ProductSpec,
};
use sepkit::io::{read_binary, write_binary, write_csv};

fn main() -> sepkit::Result<()> {
    let n = 50;
    let ball = sample_ball(n, 20_000, 1)?;
    let mean_sq: f64 = ball.points().map(|p| p.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / ball.len() as f64;
    println!("ball  n={n}: E|x|^2 = {mean_sq:.5} (exact {:.5})", n as f64 / (n as f64 + 2.0));

    let cube = sample_cube(n, 20_000, 1)?;
    let (_, r0) = empirical_mean_and_r0(&cube)?;
    println!("cube  n={n}: R0^2 = {:.4} (exact {:.4})", r0 * r0, n as f64 / 12.0);

    let spec = DistributionSpec::Product(ProductSpec::new(
        vec![
            CoordinateGenerator::Uniform { lo: 0.0, hi: 1.0 },
            CoordinateGenerator::Bernoulli { p: 0.3 },
        ],
        0.05,
    )?);
    let product = sample_product(&spec, n, 20_000, 1)?;
    let (_, r0) = empirical_mean_and_r0(&product)?;
    let DistributionSpec::Product(p) = &spec else { unreachable!() };
    println!("mixed n={n}: R0^2 = {:.4} (exact {:.4})", r0 * r0, p.r0_squared(n));

    // same seed, same bits
    assert_eq!(sample_ball(n, 100, 7)?, sample_ball(n, 100, 7)?);

    let small = sample_cube(3, 4, 2)?;
    let mut csv = Vec::new();
    write_csv(&small, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let mut bin = Vec::new();
    write_binary(&small, &mut bin)?;
    let back = read_binary(&bin[..], DistributionSpec::UnitCube, 2)?;
    assert_eq!(back.as_slice(), small.as_slice());
    println!("binary: {} bytes, round trip exact", bin.len());
    Ok(())
}
