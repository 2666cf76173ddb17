//! Reproduction runs and Monte Carlo bound validation.
//!
//! Every run is a pure function of its config and seed; tables are sorted and
//! carry no timing data in their serialized form, so repeated runs produce
//! byte-identical output.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{Read, Write};
use std::time::{Duration, Instant};

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bounds::{
    ball_angle, ball_max_m_simple, ball_pairwise, ball_single, cascade_bound, cube_pairwise, cube_single,
    cube_single_simplified, BallBoundParams, BoundResult, CubeBoundParams, MaxM,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::{empirical_mean_and_r0, sample_ball_trial, sample_cube_trial, SampleSet};
use crate::gram::{centered, for_each_gram_column};
use crate::seed::TrialSeed;
use crate::separability::fisher_sweep;

/// Default seed for all runs.
pub const DEFAULT_SEED: u64 = 20_170_401;

/// Default cap on generated coordinates (sum over cells of trials * M * n).
pub const DEFAULT_BUDGET: u128 = 100_000_000_000;

/// One-sided 3-sigma level, `Phi(3)`.
pub const THREE_SIGMA_LEVEL: f64 = 0.998_650_101_968_369_9;

/// Variance of a uniform `[0, 1]` coordinate.
pub const UNIFORM_VARIANCE: f64 = 1.0 / 12.0;

/// Below this many Bernoulli events the exact Clopper-Pearson limit is used.
pub const EXACT_BELOW: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceMethod {
    Vacuous,
    ThreeStandardErrors,
    ClopperPearson,
}

/// One-sided check that an empirical frequency does not fall below a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub successes: u64,
    pub events: u64,
    pub frequency: f64,
    pub bound: f64,
    /// Allowed shortfall `bound - frequency` before the check fails.
    pub tolerance: f64,
    pub method: ToleranceMethod,
    pub pass: bool,
}

/// `successes` out of `events` against `bound`. Uses 3 binomial standard
/// errors at the bound, or the one-sided Clopper-Pearson upper limit at the
/// same level when `events < 50`. Vacuous bounds pass trivially.
pub fn dominance(successes: u64, events: u64, bound: &BoundResult) -> Result<Dominance> {
    if events == 0 || successes > events {
        return Err(invalid(format!("{successes} successes out of {events} events")));
    }
    let b = bound.probability_lower_bound;
    let frequency = successes as f64 / events as f64;
    let (tolerance, method) = if bound.vacuous || b <= 0.0 {
        (f64::INFINITY, ToleranceMethod::Vacuous)
    } else if events < EXACT_BELOW {
        let upper = if successes == events {
            1.0
        } else {
            Beta::new(successes as f64 + 1.0, (events - successes) as f64)
                .map_err(|e| invalid(e.to_string()))?
                .inverse_cdf(THREE_SIGMA_LEVEL)
        };
        (upper - frequency, ToleranceMethod::ClopperPearson)
    } else {
        (3.0 * (b * (1.0 - b) / events as f64).sqrt(), ToleranceMethod::ThreeStandardErrors)
    };
    Ok(Dominance {
        successes,
        events,
        frequency,
        bound: b,
        tolerance,
        method,
        pass: method == ToleranceMethod::Vacuous || frequency >= b - tolerance,
    })
}

fn check_budget(requested: u128, budget: u128) -> Result<()> {
    if requested > budget {
        Err(Error::BudgetExceeded { requested, budget })
    } else {
        Ok(())
    }
}

/// Cube separability sweep configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n_probe: usize,
    pub trials: usize,
    pub seed: u64,
    pub budget: u128,
}

impl Default for SweepConfig {
    /// Desk scale: `M = 2000`, `N = 400`, 20 trials.
    fn default() -> Self {
        SweepConfig {
            dims: vec![10, 20, 30, 50, 100, 500, 1000, 2000, 3000, 5000],
            m: 2000,
            n_probe: 400,
            trials: 20,
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SweepConfig {
    /// `M = 20000`, `N = 4000`, 100 trials.
    pub fn full_scale() -> Self {
        SweepConfig {
            m: 20_000,
            n_probe: 4000,
            trials: 100,
            ..SweepConfig::default()
        }
    }

    pub fn projected_coordinates(&self) -> u128 {
        self.dims
            .iter()
            .map(|&n| self.trials as u128 * self.m as u128 * n as u128)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(invalid("dims must be a non-empty list of positive dimensions"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.m < 2 {
            return Err(invalid("M must be at least 2"));
        }
        if self.n_probe == 0 || self.n_probe > self.m {
            return Err(invalid(format!("N = {} must lie in [1, M = {}]", self.n_probe, self.m)));
        }
        check_budget(self.projected_coordinates(), self.budget)
    }
}

/// One dimension of the cube sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub trials: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n_probe: usize,
    pub mean_freq: f64,
    pub min_freq: f64,
    pub max_freq: f64,
    #[serde(rename = "bound_eq12")]
    pub bound: f64,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SweepRow {
    /// Mean frequency against the simplified cube bound, over `trials * N` probes.
    pub fn dominance(&self) -> Result<Dominance> {
        let events = (self.trials * self.n_probe) as u64;
        let successes = (self.mean_freq * events as f64).round() as u64;
        let bound = cube_single_simplified(self.n as u64, self.m as f64, UNIFORM_VARIANCE)?;
        dominance(successes, events, &bound)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub rows: Vec<SweepRow>,
}

impl ExperimentTable {
    /// CSV with header `n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(["n", "trials", "M", "N", "mean_freq", "min_freq", "max_freq", "bound_eq12", "seed"])?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let expected = ["n", "trials", "M", "N", "mean_freq", "min_freq", "max_freq", "bound_eq12", "seed"];
        let header = r.headers()?.clone();
        if header.iter().ne(expected.iter().copied()) {
            return Err(Error::Format(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
        }
        let mut rows = Vec::new();
        for (k, rec) in r.deserialize::<SweepRow>().enumerate() {
            let row = rec?;
            if !(row.min_freq <= row.mean_freq && row.mean_freq <= row.max_freq) {
                return Err(Error::Format(format!("row {}: min <= mean <= max violated", k + 1)));
            }
            rows.push(row);
        }
        Ok(ExperimentTable { rows })
    }

    pub fn row(&self, n: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub pass: bool,
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub dominance: Vec<Dominance>,
}

impl SweepReport {
    pub fn from_table(config: &SweepConfig, table: &ExperimentTable) -> Result<Self> {
        let dominance = table.rows.iter().map(SweepRow::dominance).collect::<Result<Vec<_>>>()?;
        Ok(SweepReport {
            pass: dominance.iter().all(|d| d.pass),
            config: config.clone(),
            rows: table.rows.clone(),
            dominance,
        })
    }
}

/// Trial key for dimension `n`, trial `t`; keeps samples of different
/// dimensions independent.
fn sweep_trial_key(n: usize, t: usize) -> u64 {
    ((n as u64) << 32) | t as u64
}

/// Fraction of `n_probe` probes (drawn without replacement) that the Fisher
/// functional separates from the rest of one cube sample.
pub fn sweep_trial(n: usize, m: usize, n_probe: usize, seed: u64, t: usize) -> Result<f64> {
    let key = sweep_trial_key(n, t);
    let sample = sample_cube_trial(n, m, seed, key)?;
    let mut rng = TrialSeed::new(seed, key).aux_rng();
    let mut probes = sample_indices(&mut rng, m, n_probe).into_vec();
    probes.sort_unstable();
    let verdicts = fisher_sweep(sample.as_slice(), n, &probes)?;
    Ok(verdicts.iter().filter(|v| v.separable).count() as f64 / n_probe as f64)
}

/// Cube separability sweep: for each dimension, `trials` samples of `M`
/// points, `N` Fisher probes each, all-or-nothing separability per probe.
pub fn run_dimension_sweep(config: &SweepConfig) -> Result<ExperimentTable> {
    config.validate()?;
    let mut dims = config.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut rows = Vec::with_capacity(dims.len());
    for n in dims {
        let start = Instant::now();
        let freqs = (0..config.trials)
            .into_par_iter()
            .map(|t| sweep_trial(n, config.m, config.n_probe, config.seed, t))
            .collect::<Result<Vec<_>>>()?;
        // summing in trial order keeps the mean independent of scheduling
        let mean_freq = freqs.iter().sum::<f64>() / freqs.len() as f64;
        let min_freq = freqs.iter().copied().fold(f64::INFINITY, f64::min);
        let max_freq = freqs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bound = cube_single_simplified(n as u64, config.m as f64, UNIFORM_VARIANCE)?;
        rows.push(SweepRow {
            n,
            trials: config.trials,
            m: config.m,
            n_probe: config.n_probe,
            mean_freq,
            min_freq,
            max_freq,
            bound: bound.probability_lower_bound,
            seed: config.seed,
            wall_time: start.elapsed(),
        });
    }
    Ok(ExperimentTable { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxMReport {
    pub pass: bool,
    pub n: u64,
    pub r: f64,
    pub theta: f64,
    pub max_m: MaxM,
    pub max_m_ceiling: u64,
    pub m_checked: f64,
    pub bound_at_m_checked: BoundResult,
    pub probability_target: f64,
}

/// Maximal M for the simple pairwise condition at `n = 100`, `r = 1/sqrt 2`,
/// `theta = 0.01`, and the pairwise ball bound at `M = 2.7e6`.
pub fn run_max_m_example() -> Result<MaxMReport> {
    let (n, r, theta) = (100, FRAC_1_SQRT_2, 0.01);
    let max_m = ball_max_m_simple(n, r, theta)?;
    let m_checked = 2.7e6;
    let bound = ball_pairwise(&BallBoundParams::new(n, m_checked, r)?);
    let max_m_ceiling = 2_740_000;
    let probability_target = 0.99;
    Ok(MaxMReport {
        pass: max_m.floor < max_m_ceiling && bound.probability_lower_bound >= probability_target,
        n,
        r,
        theta,
        max_m,
        max_m_ceiling,
        m_checked,
        bound_at_m_checked: bound,
        probability_target,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeCase {
    pub n: u64,
    pub r: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub theta: f64,
    pub bound: BoundResult,
    /// Ceiling the complement must stay below, when one is claimed.
    pub ceiling: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub pass: bool,
    pub cases: Vec<CascadeCase>,
}

/// Two-neuron bound at `n = 100`, `r = 1/sqrt 2` for `M = 2.74e6` and `7e16`
/// (with their ceilings `5e-14`, `5e-9`) and for `M = n + 1`.
pub fn run_cascade_examples() -> Result<CascadeReport> {
    let (n, r) = (100u64, FRAC_1_SQRT_2);
    let specs = [(2.74e6, Some(5e-14)), (7e16, Some(5e-9)), (n as f64 + 1.0, None)];
    let mut cases = Vec::with_capacity(specs.len());
    for (m, ceiling) in specs {
        let bound = cascade_bound(n, r, m)?;
        let theta = bound.complement();
        cases.push(CascadeCase {
            n,
            r,
            m,
            theta,
            bound,
            ceiling,
            pass: ceiling.is_none_or(|c| theta < c),
        });
    }
    Ok(CascadeReport {
        pass: cases.iter().all(|c| c.pass),
        cases,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCell {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeCell {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationGrid {
    pub ball: Vec<BallCell>,
    pub cube: Vec<CubeCell>,
    pub budget: u128,
}

impl Default for ValidationGrid {
    /// Ball: `n in {20, 50, 100}`, `M in {100, 1000}`, `r in {0.6, 1/sqrt 2, 0.8}`;
    /// cube: `n in {500, 1000, 2000}`, `M = 1000`, `delta = 0.5`.
    fn default() -> Self {
        let mut ball = Vec::new();
        for n in [20, 50, 100] {
            for m in [100, 1000] {
                for r in [0.6, FRAC_1_SQRT_2, 0.8] {
                    ball.push(BallCell { n, m, r });
                }
            }
        }
        let cube = [500, 1000, 2000]
            .into_iter()
            .map(|n| CubeCell { n, m: 1000, delta: 0.5 })
            .collect();
        ValidationGrid {
            ball,
            cube,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl ValidationGrid {
    pub fn projected_coordinates(&self, trials: usize) -> u128 {
        let ball: u128 = self.ball.iter().map(|c| c.n as u128 * c.m as u128).sum();
        let cube: u128 = self.cube.iter().map(|c| c.n as u128 * c.m as u128).sum();
        (ball + cube) * trials as u128
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub distribution: String,
    /// Which event: `single`, `pairwise` or `angle`.
    pub event: String,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// `r` for ball cells, `delta` for cube cells.
    pub parameter: f64,
    pub trials: usize,
    pub vacuous: bool,
    #[serde(flatten)]
    pub dominance: Dominance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub seed: u64,
    pub trials: usize,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| !r.dominance.pass)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "distribution",
            "event",
            "n",
            "M",
            "parameter",
            "trials",
            "successes",
            "frequency",
            "bound",
            "tolerance",
            "method",
            "pass",
        ])?;
        for r in &self.rows {
            let d = &r.dominance;
            let method = match d.method {
                ToleranceMethod::Vacuous => "vacuous",
                ToleranceMethod::ThreeStandardErrors => "three-standard-errors",
                ToleranceMethod::ClopperPearson => "clopper-pearson",
            };
            w.write_record([
                r.distribution.clone(),
                r.event.clone(),
                r.n.to_string(),
                r.m.to_string(),
                format!("{:?}", r.parameter),
                r.trials.to_string(),
                d.successes.to_string(),
                format!("{:?}", d.frequency),
                format!("{:?}", d.bound),
                format!("{:?}", d.tolerance),
                method.to_string(),
                d.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Radial events of the ball theorem on one sample: the last point against
/// the rest, all ordered pairs by projection, all ordered pairs by cosine.
pub fn ball_events(sample: &SampleSet, r: f64) -> [bool; 3] {
    let (n, m) = (sample.dim(), sample.len());
    let data = sample.as_slice();
    let norms: Vec<f64> = sample.points().map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let probes: Vec<usize> = (0..m).collect();
    let mut single = true;
    let mut pairwise = true;
    let mut angle = true;
    for_each_gram_column(data, n, &probes, |j, g| {
        let len_j = norms[j];
        let in_layer = len_j > r;
        let mut proj_ok = in_layer;
        let mut cos_ok = in_layer;
        for (i, &gi) in g.iter().enumerate() {
            if i == j {
                continue;
            }
            if gi >= r * len_j {
                proj_ok = false;
            }
            if gi >= r * len_j * norms[i] {
                cos_ok = false;
            }
        }
        if j == m - 1 {
            single = proj_ok;
        }
        pairwise &= proj_ok;
        angle &= cos_ok;
    });
    [single, pairwise, angle]
}

/// Product-distribution events on one sample, centered at the empirical
/// mean with the empirical `R_0`: every point in the layer
/// `1 - delta <= |x_j - mean|^2 / R_0^2 <= 1 + delta`, and normalized
/// projections below `sqrt(1 - delta)` for the last point / for every point.
pub fn cube_events(sample: &SampleSet, delta: f64) -> Result<[bool; 2]> {
    let (n, m) = (sample.dim(), sample.len());
    let (mean, r0) = empirical_mean_and_r0(sample)?;
    let c = centered(sample.as_slice(), n, mean.coords());
    let r0_sq = r0 * r0;
    let norms: Vec<f64> = c.chunks_exact(n).map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let layer = norms
        .iter()
        .all(|&l| (1.0 - delta) * r0_sq <= l * l && l * l <= (1.0 + delta) * r0_sq);
    let limit = (1.0 - delta).sqrt() * r0;
    let probes: Vec<usize> = (0..m).collect();
    let mut single = layer;
    let mut pairwise = layer;
    for_each_gram_column(&c, n, &probes, |j, g| {
        let ok = norms[j] > 0.0
            && g
                .iter()
                .enumerate()
                .all(|(i, &gi)| i == j || gi < limit * norms[j]);
        if j == m - 1 {
            single &= ok;
        }
        pairwise &= ok;
    });
    Ok([single, pairwise])
}

fn trial_key(cell: usize, t: usize) -> u64 {
    ((cell as u64) << 32) | t as u64
}

/// Monte Carlo check that each event's frequency dominates its bound.
pub fn run_bound_validation(grid: &ValidationGrid, trials: usize, seed: u64) -> Result<ValidationReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    check_budget(grid.projected_coordinates(trials), grid.budget)?;
    let mut rows = Vec::new();
    for (k, cell) in grid.ball.iter().enumerate() {
        let p = BallBoundParams::new(cell.n as u64, cell.m as f64, cell.r)?;
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| Ok(ball_events(&sample_ball_trial(cell.n, cell.m, seed, trial_key(k, t))?, cell.r)))
            .collect::<Result<Vec<_>>>()?;
        let bounds = [ball_single(&p), ball_pairwise(&p), ball_angle(&p)];
        for (e, (name, bound)) in ["single", "pairwise", "angle"].into_iter().zip(bounds).enumerate() {
            let successes = outcomes.iter().filter(|o| o[e]).count() as u64;
            rows.push(ValidationRow {
                distribution: "ball".into(),
                event: name.into(),
                n: cell.n,
                m: cell.m,
                parameter: cell.r,
                trials,
                vacuous: bound.vacuous,
                dominance: dominance(successes, trials as u64, &bound)?,
            });
        }
    }
    let offset = grid.ball.len();
    for (k, cell) in grid.cube.iter().enumerate() {
        let p = CubeBoundParams::new(
            cell.n as u64,
            cell.m as f64,
            cell.delta,
            UNIFORM_VARIANCE,
            cell.n as f64 * UNIFORM_VARIANCE,
        )?;
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| cube_events(&sample_cube_trial(cell.n, cell.m, seed, trial_key(offset + k, t))?, cell.delta))
            .collect::<Result<Vec<_>>>()?;
        let bounds = [cube_single(&p), cube_pairwise(&p)];
        for (e, (name, bound)) in ["single", "pairwise"].into_iter().zip(bounds).enumerate() {
            let successes = outcomes.iter().filter(|o| o[e]).count() as u64;
            rows.push(ValidationRow {
                distribution: "cube".into(),
                event: name.into(),
                n: cell.n,
                m: cell.m,
                parameter: cell.delta,
                trials,
                vacuous: bound.vacuous,
                dominance: dominance(successes, trials as u64, &bound)?,
            });
        }
    }
    Ok(ValidationReport {
        pass: rows.iter().all(|r| r.dominance.pass),
        seed,
        trials,
        rows,
    })
}
