//! Points, sample sets, the three distribution families the separation
//! theorems cover, and their seeded samplers.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seed::TrialSeed;

/// A point of `R^n` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("point dimension must be at least 1"));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("coordinate {k} is not finite")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "point dimension must be at least 1");
        Point(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Bounded generator for one coordinate of a product distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordinateGenerator {
    /// Uniform on `[lo, hi]`, a sub-interval of `[0, 1]`.
    Uniform { lo: f64, hi: f64 },
    /// `1` with probability `p`, else `0`.
    Bernoulli { p: f64 },
    /// Finite mixture of atoms in `[0, 1]`; weights need not be normalized.
    Discrete { values: Vec<f64>, weights: Vec<f64> },
}

impl CoordinateGenerator {
    fn validate(&self) -> Result<()> {
        match self {
            CoordinateGenerator::Uniform { lo, hi } => {
                if !(0.0 <= *lo && lo < hi && *hi <= 1.0) {
                    return Err(invalid(format!("uniform [{lo}, {hi}] is not a sub-interval of [0, 1]")));
                }
            }
            CoordinateGenerator::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(invalid(format!("bernoulli p = {p} outside [0, 1]")));
                }
            }
            CoordinateGenerator::Discrete { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return Err(invalid("discrete generator needs matching non-empty values and weights"));
                }
                if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return Err(invalid("discrete atoms must lie in [0, 1]"));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
                    return Err(invalid("discrete weights must be non-negative with positive total"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            CoordinateGenerator::Uniform { lo, hi } => 0.5 * (lo + hi),
            CoordinateGenerator::Bernoulli { p } => *p,
            CoordinateGenerator::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                dot(values, weights) / total
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            CoordinateGenerator::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
            CoordinateGenerator::Bernoulli { p } => p * (1.0 - p),
            CoordinateGenerator::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                let mean = self.mean();
                values
                    .iter()
                    .zip(weights)
                    .map(|(v, w)| w * (v - mean).powi(2))
                    .sum::<f64>()
                    / total
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            CoordinateGenerator::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            CoordinateGenerator::Bernoulli { p } => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            CoordinateGenerator::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                for (v, w) in values.iter().zip(weights) {
                    if u < *w {
                        return *v;
                    }
                    u -= w;
                }
                *values.last().expect("validated non-empty")
            }
        }
    }
}

/// Product distribution in the unit cube. Coordinate `k` is drawn from
/// `generators[k % generators.len()]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    generators: Vec<CoordinateGenerator>,
    variance_floor: f64,
}

impl ProductSpec {
    pub fn new(generators: Vec<CoordinateGenerator>, variance_floor: f64) -> Result<Self> {
        if generators.is_empty() {
            return Err(invalid("product distribution needs at least one generator"));
        }
        if !(variance_floor > 0.0 && variance_floor <= 0.25) {
            return Err(invalid(format!("variance floor {variance_floor} outside (0, 1/4]")));
        }
        for (k, g) in generators.iter().enumerate() {
            g.validate()?;
            let var = g.variance();
            if var < variance_floor {
                return Err(invalid(format!(
                    "generator {k} has variance {var} below the floor {variance_floor}"
                )));
            }
        }
        Ok(ProductSpec {
            generators,
            variance_floor,
        })
    }

    pub fn generators(&self) -> &[CoordinateGenerator] {
        &self.generators
    }

    pub fn variance_floor(&self) -> f64 {
        self.variance_floor
    }

    pub fn generator(&self, coord: usize) -> &CoordinateGenerator {
        &self.generators[coord % self.generators.len()]
    }

    /// Analytic mean vector in dimension `n`.
    pub fn mean_vector(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.generator(k).mean()).collect()
    }

    /// Analytic `R_0^2 = sum_k sigma_k^2` in dimension `n`.
    pub fn r0_squared(&self, n: usize) -> f64 {
        (0..n).map(|k| self.generator(k).variance()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    UnitBall,
    UnitCube,
    Product(ProductSpec),
}

impl DistributionSpec {
    /// Center used when a check needs "known" centering: the origin for the
    /// ball, the analytic mean for cube and product distributions.
    pub fn center(&self, n: usize) -> Vec<f64> {
        match self {
            DistributionSpec::UnitBall => vec![0.0; n],
            DistributionSpec::UnitCube => vec![0.5; n],
            DistributionSpec::Product(p) => p.mean_vector(n),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            DistributionSpec::UnitBall => dot(x, x) <= 1.0,
            _ => x.iter().all(|c| (0.0..=1.0).contains(c)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DistributionSpec::UnitBall => "ball",
            DistributionSpec::UnitCube => "cube",
            DistributionSpec::Product(_) => "product",
        }
    }
}

/// `M` points of common dimension `n`, stored row-major in one buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    data: Vec<f64>,
    n: usize,
    m: usize,
    dist: DistributionSpec,
    seed: u64,
    trial: u64,
}

impl SampleSet {
    /// Wraps externally produced rows; `dist` and `seed` are kept as provenance.
    pub fn from_rows(data: Vec<f64>, n: usize, dist: DistributionSpec, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if data.is_empty() || data.len() % n != 0 {
            return Err(invalid(format!(
                "buffer of {} reals is not a non-empty multiple of n = {n}",
                data.len()
            )));
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(invalid("sample contains non-finite coordinates"));
        }
        let m = data.len() / n;
        Ok(SampleSet {
            data,
            n,
            m,
            dist,
            seed,
            trial: 0,
        })
    }

    pub fn from_points(points: &[Point], dist: DistributionSpec, seed: u64) -> Result<Self> {
        let n = points.first().map(Point::dim).ok_or_else(|| invalid("empty point list"))?;
        let mut data = Vec::with_capacity(points.len() * n);
        for p in points {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            data.extend_from_slice(p.coords());
        }
        SampleSet::from_rows(data, n, dist, seed)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dist(&self) -> &DistributionSpec {
        &self.dist
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.n)
    }

    /// Row-major `M x n` buffer.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<f64> {
        self.data
    }

    /// Copy with every coordinate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> SampleSet {
        SampleSet {
            data: self.data.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }
}

fn check_shape(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension n must be at least 1"));
    }
    if m == 0 {
        return Err(invalid("count m must be at least 1"));
    }
    Ok(())
}

fn generate<F>(n: usize, m: usize, seed: u64, trial: u64, dist: DistributionSpec, fill: F) -> SampleSet
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut [f64]) + Sync,
{
    let trial_seed = TrialSeed::new(seed, trial);
    let mut data = vec![0.0; n * m];
    data.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        let mut rng = trial_seed.point_rng(j as u64);
        fill(&mut rng, row);
    });
    SampleSet {
        data,
        n,
        m,
        dist,
        seed,
        trial,
    }
}

fn fill_ball<R: Rng + ?Sized>(rng: &mut R, row: &mut [f64]) {
    let n = row.len();
    loop {
        for c in row.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let len = norm(row);
        if len > 0.0 {
            // radius U^{1/n}, with U in (0, 1]
            let u: f64 = 1.0 - rng.random::<f64>();
            let radius = (u.ln() / n as f64).exp();
            let scale = radius / len;
            row.iter_mut().for_each(|c| *c *= scale);
            // rounding can push the norm a hair above 1
            let len = norm(row);
            if len > 1.0 {
                row.iter_mut().for_each(|c| *c /= len);
            }
            return;
        }
    }
}

/// `m` i.i.d. points uniform in the unit ball of `R^n`.
pub fn sample_ball(n: usize, m: usize, seed: u64) -> Result<SampleSet> {
    sample_ball_trial(n, m, seed, 0)
}

pub fn sample_ball_trial(n: usize, m: usize, seed: u64, trial: u64) -> Result<SampleSet> {
    check_shape(n, m)?;
    Ok(generate(n, m, seed, trial, DistributionSpec::UnitBall, fill_ball))
}

/// `m` i.i.d. points uniform in `[0, 1]^n`.
pub fn sample_cube(n: usize, m: usize, seed: u64) -> Result<SampleSet> {
    sample_cube_trial(n, m, seed, 0)
}

pub fn sample_cube_trial(n: usize, m: usize, seed: u64, trial: u64) -> Result<SampleSet> {
    check_shape(n, m)?;
    Ok(generate(n, m, seed, trial, DistributionSpec::UnitCube, |rng, row| {
        row.iter_mut().for_each(|c| *c = rng.random::<f64>());
    }))
}

/// `m` i.i.d. points from a product distribution; `spec` must be
/// [`DistributionSpec::Product`].
pub fn sample_product(spec: &DistributionSpec, n: usize, m: usize, seed: u64) -> Result<SampleSet> {
    sample_product_trial(spec, n, m, seed, 0)
}

pub fn sample_product_trial(spec: &DistributionSpec, n: usize, m: usize, seed: u64, trial: u64) -> Result<SampleSet> {
    check_shape(n, m)?;
    let product = match spec {
        DistributionSpec::Product(p) => p,
        other => return Err(invalid(format!("sample_product needs a product spec, got {}", other.label()))),
    };
    // re-validate: a deserialized spec may bypass ProductSpec::new
    let product = ProductSpec::new(product.generators.clone(), product.variance_floor)?;
    let dist = DistributionSpec::Product(product.clone());
    Ok(generate(n, m, seed, trial, dist, move |rng, row| {
        for (k, c) in row.iter_mut().enumerate() {
            *c = product.generator(k).draw(rng);
        }
    }))
}

/// Regenerates a sample of the given family; the common entry point for the
/// experiment harness.
pub fn sample_trial(dist: &DistributionSpec, n: usize, m: usize, seed: u64, trial: u64) -> Result<SampleSet> {
    match dist {
        DistributionSpec::UnitBall => sample_ball_trial(n, m, seed, trial),
        DistributionSpec::UnitCube => sample_cube_trial(n, m, seed, trial),
        DistributionSpec::Product(_) => sample_product_trial(dist, n, m, seed, trial),
    }
}

/// Coordinate-wise mean and `R_0 = sqrt(sum of unbiased coordinate variances)`.
pub fn empirical_mean_and_r0(sample: &SampleSet) -> Result<(Point, f64)> {
    let m = sample.len();
    if m < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 points, got {m}")));
    }
    let n = sample.dim();
    let mut mean = vec![0.0; n];
    for row in sample.points() {
        mean.iter_mut().zip(row).for_each(|(a, x)| *a += x);
    }
    mean.iter_mut().for_each(|a| *a /= m as f64);
    let mut ss = vec![0.0; n];
    for row in sample.points() {
        for ((s, x), mu) in ss.iter_mut().zip(row).zip(&mean) {
            let d = x - mu;
            *s += d * d;
        }
    }
    let r0_sq: f64 = ss.iter().sum::<f64>() / (m - 1) as f64;
    Ok((Point(mean), r0_sq.sqrt()))
}

/// Spherical layer `inner <= |x - center| <= outer` together with the radius
/// of the ball that covers the cap cut off by the tangent hyperplane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerGeometry {
    inner_radius: f64,
    outer_radius: f64,
    cap_ball_radius: f64,
    center: Point,
}

impl LayerGeometry {
    /// Layer `B_n \ r B_n` of the unit ball; `rho = sqrt(1 - r^2)`.
    pub fn ball(n: usize, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(invalid(format!("r = {r} outside (0, 1)")));
        }
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        Ok(LayerGeometry {
            inner_radius: r,
            outer_radius: 1.0,
            cap_ball_radius: (1.0 - r * r).sqrt(),
            center: Point::zeros(n),
        })
    }

    /// Concentration layer `1 - delta <= |x - center|^2 / R_0^2 <= 1 + delta`;
    /// `rho^2 = 2 delta R_0^2`.
    pub fn cube(center: Point, r0_squared: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid(format!("delta = {delta} outside (0, 1)")));
        }
        if !(r0_squared > 0.0 && r0_squared.is_finite()) {
            return Err(invalid(format!("R0^2 = {r0_squared} must be positive")));
        }
        Ok(LayerGeometry {
            inner_radius: ((1.0 - delta) * r0_squared).sqrt(),
            outer_radius: ((1.0 + delta) * r0_squared).sqrt(),
            cap_ball_radius: (2.0 * delta * r0_squared).sqrt(),
            center,
        })
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn cap_ball_radius(&self) -> f64 {
        self.cap_ball_radius
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let d: f64 = x
            .iter()
            .zip(self.center.coords())
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt();
        self.inner_radius <= d && d <= self.outer_radius
    }

    /// Natural log of the upper estimate for the mass of the cap beyond the
    /// tangent hyperplane, for the uniform ball: half the volume ratio of the
    /// balls of radii `rho` and `outer`, `ln(0.5 (rho / outer)^n)`.
    pub fn ln_cap_mass_upper(&self) -> f64 {
        let n = self.center.dim() as f64;
        n * (self.cap_ball_radius / self.outer_radius).ln() - std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_shapes() {
        assert!(matches!(sample_ball(0, 5, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(sample_cube(3, 0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn one_dimensional_ball_is_the_interval() {
        let s = sample_ball(1, 10_000, 9).unwrap();
        assert!(s.points().all(|p| (-1.0..=1.0).contains(&p[0])));
        // both signs show up
        assert!(s.points().any(|p| p[0] < 0.0) && s.points().any(|p| p[0] > 0.0));
    }

    #[test]
    fn single_cube_scalar() {
        let s = sample_cube(1, 1, 0).unwrap();
        assert_eq!(s.len(), 1);
        assert!((0.0..=1.0).contains(&s.point(0)[0]));
    }

    #[test]
    fn mean_and_r0_trivial_cases() {
        let two = SampleSet::from_rows(vec![0.0, 0.0, 1.0, 1.0], 2, DistributionSpec::UnitCube, 0).unwrap();
        let (mean, _) = empirical_mean_and_r0(&two).unwrap();
        assert_eq!(mean.coords(), &[0.5, 0.5]);

        let same = SampleSet::from_rows([0.3, 0.7].repeat(50), 2, DistributionSpec::UnitCube, 0).unwrap();
        let (_, r0) = empirical_mean_and_r0(&same).unwrap();
        assert!(r0.abs() < 1e-12);

        let one = SampleSet::from_rows(vec![0.1, 0.2], 2, DistributionSpec::UnitCube, 0).unwrap();
        assert!(matches!(empirical_mean_and_r0(&one), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn product_spec_rejects_degenerate_generator() {
        let g = CoordinateGenerator::Discrete {
            values: vec![0.4],
            weights: vec![1.0],
        };
        assert!(ProductSpec::new(vec![g], 0.01).is_err());
        let half = CoordinateGenerator::Bernoulli { p: 0.5 };
        assert!(ProductSpec::new(vec![half.clone()], 0.25).is_ok());
        assert!(ProductSpec::new(vec![half], 0.26).is_err());
    }

    #[test]
    fn product_requires_product_kind() {
        assert!(sample_product(&DistributionSpec::UnitCube, 2, 2, 0).is_err());
    }

    #[test]
    fn layer_radii() {
        let ball = LayerGeometry::ball(3, 0.6).unwrap();
        assert_eq!(ball.inner_radius(), 0.6);
        assert_eq!(ball.outer_radius(), 1.0);
        assert!((ball.cap_ball_radius() - 0.8).abs() < 1e-15);
        assert!(ball.contains(&[0.7, 0.0, 0.0]));
        assert!(!ball.contains(&[0.5, 0.0, 0.0]));

        let cube = LayerGeometry::cube(Point::new(vec![0.5; 4]).unwrap(), 2.0, 0.5).unwrap();
        assert!((cube.inner_radius().powi(2) - 1.0).abs() < 1e-12);
        assert!((cube.outer_radius().powi(2) - 3.0).abs() < 1e-12);
        assert!((cube.cap_ball_radius().powi(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn point_validation() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        let json = serde_json::to_string(&Point::new(vec![1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(json, "[1.0,2.0]");
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }
}
