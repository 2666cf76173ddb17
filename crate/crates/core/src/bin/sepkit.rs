use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use sepkit::bounds::{
    ball_angle, ball_max_m_pairwise, ball_max_m_simple, ball_max_m_single, ball_pairwise, ball_single,
    cascade_bound, cube_layer_probability, cube_max_m_pairwise, cube_max_m_single, cube_pairwise,
    cube_pairwise_simplified, cube_single, cube_single_simplified, BallBoundParams, BoundResult,
    CubeBoundParams,
};
use sepkit::corrector::{audit_corrector, build_corrector, Corrector};
use sepkit::experiments::{
    run_bound_validation, run_cascade_examples, run_dimension_sweep, run_max_m_example, SweepConfig, SweepReport, ValidationGrid,
    DEFAULT_BUDGET, DEFAULT_SEED,
};
use sepkit::geometry::{sample_trial, CoordinateGenerator, DistributionSpec, Point, ProductSpec, SampleSet};
use sepkit::io::{read_binary, read_csv, write_binary, write_csv, BINARY_MAGIC};
use sepkit::separability::{
    cascade_report, check_all_pairs, check_probes, oracle_report, PointCheck, SeparationReport,
};
use sepkit::whitening::LambdaPolicy;
use sepkit::Error;

const EXIT_INTERNAL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Parser, Debug, Serialize)]
#[command(name = "sepkit", version, about = "Stochastic separation bounds, checks and correctors")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Binary,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Evaluate closed-form bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Draw a seeded sample.
    Sample(SampleArgs),
    /// Separability checks on a sample.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Build or audit a one-shot corrector.
    #[command(subcommand)]
    Correct(CorrectCmd),
    /// Reproduction runs and Monte Carlo validation.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand, Debug, Serialize)]
enum BoundsCmd {
    Ball {
        #[arg(long, value_parser = parse_dim)]
        n: u64,
        #[arg(long, value_parser = parse_count_real)]
        m: f64,
        #[arg(long, value_parser = parse_r)]
        r: f64,
    },
    Cube {
        #[arg(long, value_parser = parse_dim)]
        n: u64,
        #[arg(long, value_parser = parse_nonneg_real)]
        m: f64,
        #[arg(long, value_parser = parse_delta)]
        delta: f64,
        #[arg(long, value_parser = parse_sigma0sq)]
        sigma0sq: f64,
        /// Defaults to `n * sigma0sq`.
        #[arg(long)]
        r0sq: Option<f64>,
    },
    Cascade {
        #[arg(long, value_parser = parse_dim)]
        n: u64,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[arg(long, value_parser = parse_count_real)]
        m: f64,
    },
    MaxM {
        #[arg(long, value_parser = parse_dim)]
        n: u64,
        #[arg(long, value_parser = parse_unit_open)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = DistArg::Ball)]
        dist: DistArg,
        /// Ball only.
        #[arg(long, value_parser = parse_r)]
        r: Option<f64>,
        /// Cube only.
        #[arg(long, value_parser = parse_sigma0sq)]
        sigma0sq: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DistArg {
    Ball,
    Cube,
    Product,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long, value_enum, default_value_t = DistArg::Ball)]
    dist: DistArg,
    #[arg(long, value_parser = parse_size)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_size)]
    m: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Product generators, comma separated: `uniform:LO:HI`, `bernoulli:P`,
    /// `discrete:V1|V2|..:W1|W2|..`; coordinate k uses entry k mod len.
    #[arg(long)]
    generators: Option<String>,
    /// Variance floor of the product distribution.
    #[arg(long, value_parser = parse_sigma0sq)]
    sigma0sq: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct InputArgs {
    /// Sample file (CSV or the binary format); generated from the sample flags when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PointKind {
    Fisher,
    PairwiseR,
    Whitened,
}

#[derive(Subcommand, Debug, Serialize)]
enum CheckCmd {
    Point {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = PointKind::Fisher)]
        kind: PointKind,
        /// Required for pairwise-r.
        #[arg(long, value_parser = parse_r)]
        r: Option<f64>,
        /// Probe indices, comma separated; all points when absent.
        #[arg(long)]
        probe: Option<String>,
    },
    Pairs {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        /// Cosine (normalized) variant.
        #[arg(long)]
        angle: bool,
    },
    Cascade {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[arg(long)]
        probe: Option<String>,
    },
    Oracle {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum CorrectCmd {
    Build {
        /// Correctly handled points.
        #[command(flatten)]
        input: InputArgs,
        /// Comma separated coordinates.
        #[arg(long)]
        error_point: String,
        #[arg(long)]
        label: String,
        #[arg(long)]
        no_whiten: bool,
    },
    Audit {
        /// Corrector JSON.
        #[arg(long)]
        corrector: PathBuf,
        /// Held-out correct points.
        #[command(flatten)]
        input: InputArgs,
        /// Defaults to the corrector's source error point.
        #[arg(long)]
        error_point: Option<String>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum ExperimentCmd {
    Fig2 {
        /// Comma separated dimensions.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, value_parser = parse_size)]
        m: Option<usize>,
        /// Probes per sample.
        #[arg(long, value_parser = parse_size)]
        probes: Option<usize>,
        #[arg(long, value_parser = parse_size)]
        trials: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// M = 20000, N = 4000, 100 trials.
        #[arg(long)]
        paper_scale: bool,
        /// Maximum generated coordinates.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    Remark1,
    Cascade,
    Validate {
        #[arg(long, value_parser = parse_size, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_r(s: &str) -> Result<f64, String> {
    let v = if s == "inv-sqrt2" {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        parse_real(s)?
    };
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} outside (0, 1)"))
    }
}

fn parse_unit_open(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} outside (0, 1)"))
    }
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 0.0 && v < 2.0 / 3.0 {
        Ok(v)
    } else {
        Err(format!("{v} outside (0, 2/3)"))
    }
}

fn parse_sigma0sq(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 0.0 && v <= 0.25 {
        Ok(v)
    } else {
        Err(format!("{v} outside (0, 1/4]"))
    }
}

fn parse_count_real(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be >= 1"))
    }
}

fn parse_nonneg_real(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be >= 0"))
    }
}

fn parse_dim(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

fn parse_size(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::BudgetExceeded { .. } => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

struct Output {
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl Output {
    fn sink(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: format!("cannot write {}: {e}", p.display()),
            })?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        text.push('\n');
        let mut w = self.sink()?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    fn report(&self, report: &SeparationReport) -> Result<(), Failure> {
        match self.format_or(Format::Json) {
            Format::Json => self.json(report),
            Format::Csv => {
                let mut w = self.sink()?;
                report.write_csv(&mut w)?;
                w.flush()?;
                Ok(())
            }
            Format::Binary => Err(usage("--format binary is only supported by `sample`")),
        }
    }

    fn bounds(&self, params: serde_json::Value, results: &[(&str, BoundResult)]) -> Result<(), Failure> {
        match self.format_or(Format::Json) {
            Format::Json => {
                let mut doc = params;
                for (name, b) in results {
                    doc[*name] = serde_json::to_value(b).map_err(Error::from)?;
                }
                self.json(&doc)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(self.sink()?);
                w.write_record(["bound", "log_complement", "probability_lower_bound", "vacuous"])
                    .map_err(Error::from)?;
                for (name, b) in results {
                    w.write_record([
                        name.to_string(),
                        format!("{:?}", b.log_complement),
                        format!("{:?}", b.probability_lower_bound),
                        b.vacuous.to_string(),
                    ])
                    .map_err(Error::from)?;
                }
                w.flush()?;
                Ok(())
            }
            Format::Binary => Err(usage("--format binary is only supported by `sample`")),
        }
    }
}

fn parse_generator(text: &str) -> Result<CoordinateGenerator, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums = |s: &str| -> Result<Vec<f64>, Failure> {
        s.split('|')
            .map(|v| parse_real(v).map_err(|e| usage(format!("invalid value for '--generators': {e}"))))
            .collect()
    };
    let bad = || usage(format!("invalid value '{text}' for '--generators'"));
    match parts.as_slice() {
        ["uniform", lo, hi] => Ok(CoordinateGenerator::Uniform {
            lo: nums(lo)?[0],
            hi: nums(hi)?[0],
        }),
        ["bernoulli", p] => Ok(CoordinateGenerator::Bernoulli { p: nums(p)?[0] }),
        ["discrete", values, weights] => Ok(CoordinateGenerator::Discrete {
            values: nums(values)?,
            weights: nums(weights)?,
        }),
        _ => Err(bad()),
    }
}

fn distribution(args: &SampleArgs) -> Result<DistributionSpec, Failure> {
    Ok(match args.dist {
        DistArg::Ball => DistributionSpec::UnitBall,
        DistArg::Cube => DistributionSpec::UnitCube,
        DistArg::Product => {
            let text = args
                .generators
                .as_deref()
                .ok_or_else(|| usage("--dist product requires '--generators'"))?;
            let gens = text.split(',').map(parse_generator).collect::<Result<Vec<_>, _>>()?;
            let floor = args
                .sigma0sq
                .ok_or_else(|| usage("--dist product requires '--sigma0sq'"))?;
            DistributionSpec::Product(ProductSpec::new(gens, floor)?)
        }
    })
}

fn generate(args: &SampleArgs) -> Result<SampleSet, Failure> {
    let dist = distribution(args)?;
    let n = args.n.ok_or_else(|| usage("missing '--n'"))?;
    let m = args.m.ok_or_else(|| usage("missing '--m'"))?;
    Ok(sample_trial(&dist, n, m, args.seed, args.trial)?)
}

fn load(input: &InputArgs) -> Result<SampleSet, Failure> {
    let Some(path) = &input.input else {
        return generate(&input.sample);
    };
    let dist = distribution(&input.sample)?;
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
    let sample = if bytes.starts_with(BINARY_MAGIC) {
        read_binary(&bytes[..], dist, input.sample.seed)?
    } else {
        read_csv(&bytes[..], dist, input.sample.seed)?
    };
    Ok(sample)
}

fn parse_indices(text: Option<&str>, m: usize) -> Result<Vec<usize>, Failure> {
    match text {
        None => Ok((0..m).collect()),
        Some(t) => t
            .split(',')
            .map(|s| match s.trim().parse::<usize>() {
                Ok(v) if v < m => Ok(v),
                _ => Err(usage(format!("invalid value '{s}' for '--probe' (sample has {m} points)"))),
            })
            .collect(),
    }
}

fn parse_point(text: &str, flag: &str) -> Result<Point, Failure> {
    let coords = text
        .split(',')
        .map(|s| parse_real(s.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("invalid value for '{flag}': {e}")))?;
    Point::new(coords).map_err(|e| usage(format!("invalid value for '{flag}': {e}")))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn bounds(cmd: &BoundsCmd, out: &Output) -> Outcome {
    match *cmd {
        BoundsCmd::Ball { n, m, r } => {
            let p = BallBoundParams::new(n, m, r)?;
            out.bounds(
                json!({"n": n, "M": m, "r": r, "rho": p.rho()}),
                &[("single", ball_single(&p)), ("pairwise", ball_pairwise(&p)), ("angle", ball_angle(&p))],
            )?;
        }
        BoundsCmd::Cube {
            n,
            m,
            delta,
            sigma0sq,
            r0sq,
        } => {
            let r0sq = r0sq.unwrap_or(n as f64 * sigma0sq);
            let p = CubeBoundParams::new(n, m, delta, sigma0sq, r0sq)?;
            out.bounds(
                json!({"n": n, "M": m, "delta": delta, "sigma0sq": sigma0sq, "r0sq": r0sq, "t": p.t(),
                       "layer_probability": cube_layer_probability(&p)}),
                &[
                    ("single", cube_single(&p)),
                    ("pairwise", cube_pairwise(&p)),
                    ("single_simplified", cube_single_simplified(n, m, sigma0sq)?),
                    ("pairwise_simplified", cube_pairwise_simplified(n, m, sigma0sq)?),
                ],
            )?;
        }
        BoundsCmd::Cascade { n, r, m } => {
            let b = cascade_bound(n, r, m)?;
            out.bounds(json!({"n": n, "M": m, "r": r, "theta": b.complement()}), &[("cascade", b)])?;
        }
        BoundsCmd::MaxM {
            n,
            theta,
            dist,
            r,
            sigma0sq,
        } => {
            let doc = match dist {
                DistArg::Ball => {
                    let r = r.ok_or_else(|| usage("--dist ball requires '--r'"))?;
                    json!({"n": n, "r": r, "theta": theta,
                           "single": ball_max_m_single(n, r, theta)?,
                           "pairwise": ball_max_m_pairwise(n, r, theta)?,
                           "simple": ball_max_m_simple(n, r, theta)?})
                }
                DistArg::Cube | DistArg::Product => {
                    let s = sigma0sq.ok_or_else(|| usage("--dist cube requires '--sigma0sq'"))?;
                    json!({"n": n, "sigma0sq": s, "theta": theta,
                           "single": cube_max_m_single(n, s, theta)?,
                           "pairwise": cube_max_m_pairwise(n, s, theta)?})
                }
            };
            match out.format_or(Format::Json) {
                Format::Json => out.json(&doc)?,
                _ => return Err(usage("'bounds max-m' only supports --format json")),
            }
        }
    }
    Ok(0)
}

fn check(cmd: &CheckCmd, out: &Output) -> Outcome {
    let report = match cmd {
        CheckCmd::Point { input, kind, r, probe } => {
            let sample = load(input)?;
            let probes = parse_indices(probe.as_deref(), sample.len())?;
            let kind = match kind {
                PointKind::Fisher => PointCheck::Fisher,
                PointKind::Whitened => PointCheck::Whitened(LambdaPolicy::Auto),
                PointKind::PairwiseR => PointCheck::PairwiseR(r.ok_or_else(|| usage("--kind pairwise-r requires '--r'"))?),
            };
            check_probes(&sample, &probes, kind)?
        }
        CheckCmd::Pairs { input, r, angle } => check_all_pairs(&load(input)?, *r, *angle)?,
        CheckCmd::Cascade { input, r, probe } => {
            let sample = load(input)?;
            let probes = parse_indices(probe.as_deref(), sample.len())?;
            cascade_report(&sample, &probes, *r)?
        }
        CheckCmd::Oracle { input } => oracle_report(&load(input)?)?,
    };
    out.report(&report)?;
    Ok(0)
}

fn correct(cmd: &CorrectCmd, out: &Output) -> Outcome {
    if out.format_or(Format::Json) != Format::Json {
        return Err(usage("'correct' only supports --format json"));
    }
    match cmd {
        CorrectCmd::Build {
            input,
            error_point,
            label,
            no_whiten,
        } => {
            let sample = load(input)?;
            let err = parse_point(error_point, "--error-point")?;
            let c = build_corrector(&sample, &err, label.clone(), !no_whiten)?;
            let mut w = out.sink()?;
            w.write_all(c.to_json()?.as_bytes())?;
            w.flush()?;
        }
        CorrectCmd::Audit {
            corrector,
            input,
            error_point,
        } => {
            let c: Corrector<String> = Corrector::from_json(&read_text(corrector)?)?;
            let held_out = load(input)?;
            let err = match error_point {
                Some(t) => parse_point(t, "--error-point")?,
                None => c.source_error_point().clone(),
            };
            out.json(&audit_corrector(&c, &held_out, &err)?)?;
        }
    }
    Ok(0)
}

fn experiment(cmd: &ExperimentCmd, out: &Output) -> Outcome {
    let pass = match cmd {
        ExperimentCmd::Fig2 {
            dims,
            m,
            probes,
            trials,
            seed,
            paper_scale,
            budget,
        } => {
            let mut cfg = if *paper_scale {
                SweepConfig::full_scale()
            } else {
                SweepConfig::default()
            };
            if let Some(d) = dims {
                cfg.dims = d
                    .split(',')
                    .map(|s| parse_size(s.trim()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| usage(format!("invalid value for '--dims': {e}")))?;
            }
            cfg.m = m.unwrap_or(cfg.m);
            cfg.n_probe = probes.unwrap_or(cfg.n_probe);
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.seed = *seed;
            cfg.budget = *budget;
            cfg.validate()?;
            echo("resolved", &cfg);
            let table = run_dimension_sweep(&cfg)?;
            let report = SweepReport::from_table(&cfg, &table)?;
            match out.format_or(Format::Csv) {
                Format::Csv => {
                    let mut w = out.sink()?;
                    table.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Json => out.json(&report)?,
                Format::Binary => return Err(usage("--format binary is only supported by `sample`")),
            }
            report.pass
        }
        ExperimentCmd::Remark1 => {
            let r = run_max_m_example()?;
            out.json(&r)?;
            r.pass
        }
        ExperimentCmd::Cascade => {
            let r = run_cascade_examples()?;
            out.json(&r)?;
            r.pass
        }
        ExperimentCmd::Validate { trials, seed, budget } => {
            let grid = ValidationGrid {
                budget: *budget,
                ..ValidationGrid::default()
            };
            echo("grid", &grid);
            let r = run_bound_validation(&grid, *trials, *seed)?;
            match out.format_or(Format::Json) {
                Format::Json => out.json(&r)?,
                Format::Csv => {
                    let mut w = out.sink()?;
                    r.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Binary => return Err(usage("--format binary is only supported by `sample`")),
            }
            r.pass
        }
    };
    Ok(if pass { 0 } else { EXIT_ASSERTION })
}

fn sample(args: &SampleArgs, out: &Output) -> Outcome {
    let s = generate(args)?;
    let mut w = out.sink()?;
    match out.format_or(Format::Csv) {
        Format::Csv => write_csv(&s, &mut w)?,
        Format::Binary => write_binary(&s, &mut w)?,
        Format::Json => return Err(usage("'sample' supports --format csv or binary")),
    }
    w.flush()?;
    Ok(0)
}

fn echo<T: Serialize>(label: &str, value: &T) {
    if let Ok(text) = serde_json::to_string(value) {
        eprintln!("# {label}: {text}");
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("SEPKIT_THREADS") {
        let k = parse_size(&v).map_err(|e| usage(format!("invalid SEPKIT_THREADS: {e}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    echo("config", &cli);
    let out = Output {
        format: cli.format,
        out: cli.out.clone(),
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Bounds(c) => bounds(c, &out),
        Command::Sample(a) => sample(a, &out),
        Command::Check(c) => check(c, &out),
        Command::Correct(c) => correct(c, &out),
        Command::Experiment(c) => experiment(c, &out),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
