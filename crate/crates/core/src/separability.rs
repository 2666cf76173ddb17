//! Empirical separability checks.
//!
//! * the Fisher-form functional `l(x) = (x_i - mean, x - mean) - |x_i - mean|^2`,
//!   optionally in whitened coordinates;
//! * the radial events behind the ball bounds (`pairwise-r`, `angle-r`);
//! * an exact extreme-point oracle (linear feasibility with a convex-combination
//!   certificate);
//! * the two-neuron cascade separator.
//!
//! Ties count as not separated: `l(x_j) = 0` is a violation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, norm, DistributionSpec, Point, SampleSet};
use crate::gram::{centered, column_mean, for_each_gram_column};
use crate::lp::{phase_one, Feasibility};
use crate::whitening::{whiten, LambdaPolicy};

/// Oracle size limits (desk scale).
pub const ORACLE_MAX_POINTS: usize = 500;
pub const ORACLE_MAX_DIM: usize = 50;

/// `l(x) = (weights, x) - offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFunctional {
    weights: Vec<f64>,
    offset: f64,
}

impl LinearFunctional {
    pub fn new(weights: Vec<f64>, offset: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("functional needs at least one weight"));
        }
        if weights.iter().any(|w| !w.is_finite()) || !offset.is_finite() {
            return Err(invalid("functional weights and offset must be finite"));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::DegenerateProbe);
        }
        Ok(LinearFunctional { weights, offset })
    }

    /// The half-space that contains everything (`l = 1`); the only functional
    /// allowed zero weights.
    pub fn accept_all(n: usize) -> Self {
        LinearFunctional {
            weights: vec![0.0; n],
            offset: -1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn weight_norm(&self) -> f64 {
        norm(&self.weights)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) - self.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Fisher,
    PairwiseR,
    AngleR,
    Whitened,
    Oracle,
    Cascade,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Fisher => "fisher",
            CheckKind::PairwiseR => "pairwise-r",
            CheckKind::AngleR => "angle-r",
            CheckKind::Whitened => "whitened",
            CheckKind::Oracle => "oracle",
            CheckKind::Cascade => "cascade",
        }
    }
}

/// Point-level check selector for [`check_point_separable`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointCheck {
    Fisher,
    PairwiseR(f64),
    Whitened(LambdaPolicy),
}

impl PointCheck {
    pub fn kind(&self) -> CheckKind {
        match self {
            PointCheck::Fisher => CheckKind::Fisher,
            PointCheck::PairwiseR(_) => CheckKind::PairwiseR,
            PointCheck::Whitened(_) => CheckKind::Whitened,
        }
    }
}

mod extended_f64 {
    //! JSON has no infinities; they travel as the strings "inf" / "-inf".
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

fn fmt_extended(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v > 0.0 {
        "inf".into()
    } else if v < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointVerdict {
    pub index: usize,
    pub separable: bool,
    /// Signed distance-like margin, normalized by the functional's weight norm;
    /// positive iff separable. `+inf` when there is nothing to separate from.
    #[serde(with = "extended_f64")]
    pub margin: f64,
    pub violator_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub check_kind: CheckKind,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub fraction_separable: f64,
    pub per_point: Vec<PointVerdict>,
}

impl SeparationReport {
    pub fn new(check_kind: CheckKind, sample: &SampleSet, per_point: Vec<PointVerdict>) -> Self {
        let separable = per_point.iter().filter(|v| v.separable).count();
        let fraction_separable = if per_point.is_empty() {
            0.0
        } else {
            separable as f64 / per_point.len() as f64
        };
        SeparationReport {
            check_kind,
            n: sample.dim(),
            m: sample.len(),
            seed: sample.seed(),
            fraction_separable,
            per_point,
        }
    }

    /// Every checked point separable (the joint event of the all-pairs checks).
    pub fn all_separable(&self) -> bool {
        !self.per_point.is_empty() && self.per_point.iter().all(|v| v.separable)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// CSV with header `index,separable,margin,violator_count`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "separable", "margin", "violator_count"])?;
        for v in &self.per_point {
            w.write_record([
                v.index.to_string(),
                v.separable.to_string(),
                fmt_extended(v.margin),
                v.violator_count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_probe(sample: &SampleSet, probe: usize) -> Result<()> {
    if probe >= sample.len() {
        return Err(invalid(format!(
            "probe index {probe} out of range for {} points",
            sample.len()
        )));
    }
    Ok(())
}

/// Center used by the radial checks: the origin for ball samples, the
/// empirical mean otherwise.
pub fn radial_center(sample: &SampleSet) -> Vec<f64> {
    match sample.dist() {
        DistributionSpec::UnitBall => vec![0.0; sample.dim()],
        _ => column_mean(sample.as_slice(), sample.dim()),
    }
}

/// Fisher-form functional for `probe` with the empirical mean as center.
pub fn fisher_functional(sample: &SampleSet, probe: usize) -> Result<LinearFunctional> {
    check_probe(sample, probe)?;
    if sample.len() < 2 {
        return Err(Error::InsufficientData("fisher functional needs M >= 2".into()));
    }
    let mean = column_mean(sample.as_slice(), sample.dim());
    let w: Vec<f64> = sample.point(probe).iter().zip(&mean).map(|(x, m)| x - m).collect();
    let offset = dot(&w, &mean) + dot(&w, &w);
    LinearFunctional::new(w, offset)
}

/// Verdict from the values `l(x_j) = g[j] - g[probe]` where `g` holds inner
/// products of the centered probe with all centered points.
fn fisher_verdict(probe: usize, g: &[f64]) -> Result<PointVerdict> {
    let sq = g[probe];
    if sq <= 0.0 {
        return Err(Error::DegenerateProbe);
    }
    let mut max_l = f64::NEG_INFINITY;
    let mut violators = 0;
    for (j, &gj) in g.iter().enumerate() {
        if j == probe {
            continue;
        }
        let l = gj - sq;
        if l >= 0.0 {
            violators += 1;
        }
        max_l = max_l.max(l);
    }
    Ok(PointVerdict {
        index: probe,
        separable: violators == 0,
        margin: -max_l / sq.sqrt(),
        violator_count: violators,
    })
}

fn fisher_single(data: &[f64], n: usize, probe: usize) -> Result<PointVerdict> {
    let mean = column_mean(data, n);
    let c = centered(data, n, &mean);
    let cp = &c[probe * n..(probe + 1) * n];
    let g: Vec<f64> = c.chunks_exact(n).map(|row| dot(row, cp)).collect();
    fisher_verdict(probe, &g)
}

/// Fisher verdicts for many probes at once, using blocked gemm.
/// `data` is row-major and not yet centered.
pub(crate) fn fisher_sweep(data: &[f64], n: usize, probes: &[usize]) -> Result<Vec<PointVerdict>> {
    let mean = column_mean(data, n);
    let c = centered(data, n, &mean);
    let mut out = Vec::with_capacity(probes.len());
    let mut err = None;
    for_each_gram_column(&c, n, probes, |p, g| match fisher_verdict(p, g) {
        Ok(v) => out.push(v),
        Err(e) => {
            err.get_or_insert(e);
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn radial_verdict(probe: usize, g: &[f64], r: f64) -> Result<PointVerdict> {
    let len = g[probe].sqrt();
    if len == 0.0 {
        return Err(Error::DegeneratePoint(probe));
    }
    let mut max_proj = f64::NEG_INFINITY;
    let mut violators = 0;
    for (j, &gj) in g.iter().enumerate() {
        if j == probe {
            continue;
        }
        let proj = gj / len;
        if proj >= r {
            violators += 1;
        }
        max_proj = max_proj.max(proj);
    }
    let margin = (len - r).min(r - max_proj);
    Ok(PointVerdict {
        index: probe,
        separable: len > r && violators == 0,
        margin,
        violator_count: violators,
    })
}

/// Checks whether `probe` is separated from the rest of the sample.
///
/// * `Fisher`: `l(x_j) < 0` for all `j != probe`.
/// * `PairwiseR(r)`: `|x_probe| > r` and `(x_j, x_probe / |x_probe|) < r`,
///   with data centered by [`radial_center`].
/// * `Whitened(policy)`: the Fisher check after whitening the sample.
pub fn check_point_separable(sample: &SampleSet, probe: usize, kind: PointCheck) -> Result<PointVerdict> {
    check_probe(sample, probe)?;
    let n = sample.dim();
    if sample.len() == 1 {
        return Ok(PointVerdict {
            index: probe,
            separable: true,
            margin: f64::INFINITY,
            violator_count: 0,
        });
    }
    match kind {
        PointCheck::Fisher => fisher_single(sample.as_slice(), n, probe),
        PointCheck::PairwiseR(r) => {
            if !(r > 0.0 && r < 1.0) {
                return Err(invalid(format!("r = {r} outside (0, 1)")));
            }
            let c = centered(sample.as_slice(), n, &radial_center(sample));
            let cp = &c[probe * n..(probe + 1) * n];
            let g: Vec<f64> = c.chunks_exact(n).map(|row| dot(row, cp)).collect();
            radial_verdict(probe, &g, r)
        }
        PointCheck::Whitened(policy) => {
            let w = whiten(sample, policy)?;
            let z = w.apply_all(sample)?;
            fisher_single(&z, n, probe)
        }
    }
}

/// Runs a point check over a list of probes; verdicts come back in probe order.
pub fn check_probes(sample: &SampleSet, probes: &[usize], kind: PointCheck) -> Result<SeparationReport> {
    for &p in probes {
        check_probe(sample, p)?;
    }
    let n = sample.dim();
    let verdicts = if sample.len() == 1 {
        probes
            .iter()
            .map(|&p| check_point_separable(sample, p, kind))
            .collect::<Result<Vec<_>>>()?
    } else {
        match kind {
            PointCheck::Fisher => fisher_sweep(sample.as_slice(), n, probes)?,
            PointCheck::Whitened(policy) => {
                let w = whiten(sample, policy)?;
                fisher_sweep(&w.apply_all(sample)?, n, probes)?
            }
            PointCheck::PairwiseR(r) => {
                if !(r > 0.0 && r < 1.0) {
                    return Err(invalid(format!("r = {r} outside (0, 1)")));
                }
                let c = centered(sample.as_slice(), n, &radial_center(sample));
                let mut out = Vec::with_capacity(probes.len());
                let mut err = None;
                for_each_gram_column(&c, n, probes, |p, g| match radial_verdict(p, g, r) {
                    Ok(v) => out.push(v),
                    Err(e) => {
                        err.get_or_insert(e);
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                out
            }
        }
    };
    Ok(SeparationReport::new(kind.kind(), sample, verdicts))
}

/// Joint radial event over all ordered pairs: each point `j` must satisfy
/// `|x_j| > r` and, for every `i != j`, `(x_i, x_j / |x_j|) < r`
/// (`angle = false`) or `cos(x_i, x_j) < r` (`angle = true`).
/// The report's [`SeparationReport::all_separable`] is the joint event.
pub fn check_all_pairs(sample: &SampleSet, r: f64, angle: bool) -> Result<SeparationReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("r = {r} outside (0, 1)")));
    }
    let n = sample.dim();
    let m = sample.len();
    let c = centered(sample.as_slice(), n, &radial_center(sample));
    let norms: Vec<f64> = c.chunks_exact(n).map(norm).collect();
    if let Some(j) = norms.iter().position(|&l| l == 0.0) {
        return Err(Error::DegeneratePoint(j));
    }
    let probes: Vec<usize> = (0..m).collect();
    let mut verdicts = Vec::with_capacity(m);
    for_each_gram_column(&c, n, &probes, |j, g| {
        let len_j = norms[j];
        let mut max_val = f64::NEG_INFINITY;
        let mut violators = 0;
        for (i, &gi) in g.iter().enumerate() {
            if i == j {
                continue;
            }
            let v = if angle { gi / (len_j * norms[i]) } else { gi / len_j };
            if v >= r {
                violators += 1;
            }
            max_val = max_val.max(v);
        }
        verdicts.push(PointVerdict {
            index: j,
            separable: len_j > r && violators == 0,
            margin: (len_j - r).min(r - max_val),
            violator_count: violators,
        });
    });
    let kind = if angle { CheckKind::AngleR } else { CheckKind::PairwiseR };
    Ok(SeparationReport::new(kind, sample, verdicts))
}

/// Outcome of the exact extreme-point test.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleVerdict {
    /// `functional(probe) = 1` and `functional(x_j) <= -1` for every other point.
    Separable { functional: LinearFunctional },
    /// `probe = sum_j coefficients[j] x_j`, coefficients non-negative summing
    /// to one, `coefficients[probe] = 0`; `residual` is the max-norm error of
    /// both identities.
    NotSeparable { coefficients: Vec<f64>, residual: f64 },
}

impl OracleVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, OracleVerdict::Separable { .. })
    }
}

/// Separates `target` from the rows of `others` (row-major, dimension `n`)
/// by linear feasibility. No size limits.
pub(crate) fn separate_point(others: &[f64], n: usize, target: &[f64]) -> OracleVerdict {
    let k = others.len() / n;
    // rows: n coordinate equations, then sum(lambda) = 1
    let rows = n + 1;
    let mut a = vec![0.0; rows * k];
    for (j, x) in others.chunks_exact(n).enumerate() {
        for i in 0..n {
            a[i * k + j] = x[i];
        }
        a[n * k + j] = 1.0;
    }
    let mut b = target.to_vec();
    b.push(1.0);
    match phase_one(&a, &b, k) {
        Feasibility::Feasible { x } => {
            let mut residual = (x.iter().sum::<f64>() - 1.0).abs();
            for i in 0..n {
                let s: f64 = others.chunks_exact(n).zip(&x).map(|(row, l)| l * row[i]).sum();
                residual = residual.max((s - target[i]).abs());
            }
            OracleVerdict::NotSeparable {
                coefficients: x,
                residual,
            }
        }
        Feasibility::Infeasible { y } => {
            let (w, w0) = y.split_at(n);
            let w0 = w0[0];
            let gap = dot(w, target) + w0;
            // (w, x_j) + w0 <= 0 < (w, target) + w0; rescale so the gap is >= 2
            let scale = 2.0 / gap;
            let weights: Vec<f64> = w.iter().map(|v| v * scale).collect();
            let offset = dot(&weights, target) - 1.0;
            let functional = LinearFunctional::new(weights, offset).unwrap_or_else(|_| LinearFunctional::accept_all(n));
            OracleVerdict::Separable { functional }
        }
    }
}

/// Exact decision of `x_probe not in conv(other points)`.
pub fn oracle_check(sample: &SampleSet, probe: usize) -> Result<OracleVerdict> {
    check_probe(sample, probe)?;
    let (m, n) = (sample.len(), sample.dim());
    if m > ORACLE_MAX_POINTS || n > ORACLE_MAX_DIM {
        return Err(Error::OracleTooLarge { m, n });
    }
    let others: Vec<f64> = sample
        .points()
        .enumerate()
        .filter(|(j, _)| *j != probe)
        .flat_map(|(_, p)| p.iter().copied())
        .collect();
    Ok(match separate_point(&others, n, sample.point(probe)) {
        OracleVerdict::NotSeparable { coefficients, residual } => {
            let mut full = coefficients;
            full.insert(probe, 0.0);
            OracleVerdict::NotSeparable {
                coefficients: full,
                residual,
            }
        }
        sep => sep,
    })
}

pub fn oracle_separable(sample: &SampleSet, probe: usize) -> Result<bool> {
    Ok(oracle_check(sample, probe)?.is_separable())
}

/// Conjunction of two half-spaces accepting one probe and rejecting every
/// other sample point. Functionals act on raw (uncentered) coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeSeparator {
    pub probe_index: usize,
    /// Radial hyperplane: `(x - c, x_probe_dir) > r`.
    pub first: LinearFunctional,
    /// Orthogonal hyperplane handling the cap violators; accept-all when there are none.
    pub second: LinearFunctional,
    pub violators: Vec<usize>,
}

impl CascadeSeparator {
    pub fn accepts(&self, x: &[f64]) -> bool {
        self.first.eval(x) > 0.0 && self.second.eval(x) > 0.0
    }
}

/// Builds the two-neuron separator for `probe` with radial threshold `r`.
pub fn cascade_separate(sample: &SampleSet, probe: usize, r: f64) -> Result<CascadeSeparator> {
    check_probe(sample, probe)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("r = {r} outside (0, 1)")));
    }
    let n = sample.dim();
    let center = radial_center(sample);
    let c = centered(sample.as_slice(), n, &center);
    let cp = &c[probe * n..(probe + 1) * n];
    let len = norm(cp);
    if len <= r {
        return Err(Error::ProbeNotInLayer { norm: len, r });
    }
    let dir: Vec<f64> = cp.iter().map(|v| v / len).collect();
    let violators: Vec<usize> = c
        .chunks_exact(n)
        .enumerate()
        .filter(|(j, row)| *j != probe && dot(row, &dir) >= r)
        .map(|(j, _)| j)
        .collect();
    if violators.len() >= n {
        return Err(Error::TooManyViolators {
            count: violators.len(),
            limit: n - 1,
        });
    }
    let first = LinearFunctional::new(dir.clone(), r + dot(&dir, &center))?;

    let second = if violators.is_empty() {
        LinearFunctional::accept_all(n)
    } else {
        // project violators onto the hyperplane orthogonal to the probe direction
        let mut projected = Vec::with_capacity(violators.len() * n);
        for &j in &violators {
            let row = &c[j * n..(j + 1) * n];
            let t = dot(row, &dir);
            projected.extend(row.iter().zip(&dir).map(|(v, d)| v - t * d));
        }
        let origin = vec![0.0; n];
        let w = match separate_point(&projected, n, &origin) {
            OracleVerdict::Separable { functional } => functional.weights().to_vec(),
            OracleVerdict::NotSeparable { .. } => return Err(Error::NotSeparable { margin: 0.0 }),
        };
        let t = dot(&w, &dir);
        let mut y: Vec<f64> = w.iter().zip(&dir).map(|(a, d)| a - t * d).collect();
        let y_len = norm(&y);
        if y_len == 0.0 {
            return Err(Error::NotSeparable { margin: 0.0 });
        }
        y.iter_mut().for_each(|v| *v /= y_len);
        // one more projection pass pins (y, dir) to rounding level
        let t = dot(&y, &dir);
        y.iter_mut().zip(&dir).for_each(|(a, d)| *a -= t * d);
        debug_assert!(dot(&y, &dir).abs() <= 1e-10);
        let max_violator = violators
            .iter()
            .map(|&j| dot(&c[j * n..(j + 1) * n], &y))
            .fold(f64::NEG_INFINITY, f64::max);
        if max_violator >= 0.0 {
            return Err(Error::NotSeparable { margin: -max_violator });
        }
        let q = 0.5 * max_violator;
        let offset = q + dot(&y, &center);
        LinearFunctional::new(y, offset)?
    };

    let sep = CascadeSeparator {
        probe_index: probe,
        first,
        second,
        violators,
    };
    if !sep.accepts(sample.point(probe)) {
        return Err(Error::NotSeparable { margin: 0.0 });
    }
    if let Some(j) = (0..sample.len()).find(|&j| j != probe && sep.accepts(sample.point(j))) {
        let margin = -sep.first.eval(sample.point(j)).min(sep.second.eval(sample.point(j)));
        return Err(Error::NotSeparable { margin });
    }
    Ok(sep)
}

/// Convenience wrapper returning the Fisher report for every point.
pub fn fisher_report(sample: &SampleSet) -> Result<SeparationReport> {
    let probes: Vec<usize> = (0..sample.len()).collect();
    check_probes(sample, &probes, PointCheck::Fisher)
}

/// Oracle report over every point (desk scale).
pub fn oracle_report(sample: &SampleSet) -> Result<SeparationReport> {
    let mut verdicts = Vec::with_capacity(sample.len());
    for j in 0..sample.len() {
        let v = oracle_check(sample, j)?;
        let (separable, margin) = match &v {
            OracleVerdict::Separable { functional } => {
                let worst = sample
                    .points()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, p)| functional.eval(p))
                    .fold(f64::NEG_INFINITY, f64::max);
                let margin = if worst.is_finite() {
                    -worst / functional.weight_norm()
                } else {
                    f64::INFINITY
                };
                (true, margin)
            }
            OracleVerdict::NotSeparable { .. } => (false, 0.0),
        };
        verdicts.push(PointVerdict {
            index: j,
            separable,
            margin,
            violator_count: usize::from(!separable),
        });
    }
    Ok(SeparationReport::new(CheckKind::Oracle, sample, verdicts))
}

/// Cascade report over the listed probes; a failed construction is a
/// non-separable verdict whose violator count is the cap population.
pub fn cascade_report(sample: &SampleSet, probes: &[usize], r: f64) -> Result<SeparationReport> {
    let n = sample.dim();
    let center = radial_center(sample);
    let c = centered(sample.as_slice(), n, &center);
    let mut verdicts = Vec::with_capacity(probes.len());
    for &p in probes {
        let verdict = match cascade_separate(sample, p, r) {
            Ok(sep) => {
                let worst = (0..sample.len())
                    .filter(|&j| j != p)
                    .map(|j| sep.first.eval(sample.point(j)).min(sep.second.eval(sample.point(j))))
                    .fold(f64::NEG_INFINITY, f64::max);
                PointVerdict {
                    index: p,
                    separable: true,
                    margin: if worst.is_finite() { -worst } else { f64::INFINITY },
                    violator_count: sep.violators.len(),
                }
            }
            Err(Error::ProbeNotInLayer { norm, r }) => PointVerdict {
                index: p,
                separable: false,
                margin: norm - r,
                violator_count: 0,
            },
            Err(Error::TooManyViolators { count, .. }) => PointVerdict {
                index: p,
                separable: false,
                margin: 0.0,
                violator_count: count,
            },
            Err(Error::NotSeparable { margin }) => {
                let cp = &c[p * n..(p + 1) * n];
                let len = norm(cp);
                let count = c
                    .chunks_exact(n)
                    .enumerate()
                    .filter(|(j, row)| *j != p && dot(row, cp) / len >= r)
                    .count();
                PointVerdict {
                    index: p,
                    separable: false,
                    margin: -margin.abs(),
                    violator_count: count,
                }
            }
            Err(e) => return Err(e),
        };
        verdicts.push(verdict);
    }
    Ok(SeparationReport::new(CheckKind::Cascade, sample, verdicts))
}

/// Builds a sample from explicit points (tests and examples).
pub fn sample_from(points: &[&[f64]], dist: DistributionSpec) -> Result<SampleSet> {
    let pts = points
        .iter()
        .map(|p| Point::new(p.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::from_points(&pts, dist, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_ball;

    fn cube(points: &[&[f64]]) -> SampleSet {
        sample_from(points, DistributionSpec::UnitCube).unwrap()
    }

    #[test]
    fn fisher_is_zero_at_probe() {
        let s = sample_ball(7, 40, 5).unwrap();
        for i in 0..s.len() {
            let l = fisher_functional(&s, i).unwrap();
            let scale = l.weight_norm().powi(2);
            assert!(l.eval(s.point(i)).abs() <= 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn fisher_three_point_instance() {
        let s = cube(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let l = fisher_functional(&s, 1).unwrap();
        // mean (1/3, 1/3), w = (2/3, -1/3), |w|^2 = 5/9
        // l((0,0)) = (w, (-1/3, -1/3)) - 5/9 = -1/9 - 5/9 = -2/3
        // l((0,1)) = (w, (-1/3, 2/3)) - 5/9 = -4/9 - 5/9 = -1
        assert!((l.eval(&[0.0, 0.0]) + 2.0 / 3.0).abs() < 1e-12);
        assert!((l.eval(&[0.0, 1.0]) + 1.0).abs() < 1e-12);
        let v = check_point_separable(&s, 1, PointCheck::Fisher).unwrap();
        assert!(v.separable);
        // margin = 2/3 / |w| = (2/3) / sqrt(5/9)
        assert!((v.margin - (2.0 / 3.0) / (5.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn probe_at_mean_is_degenerate() {
        let s = cube(&[&[0.0, 0.5], &[1.0, 0.5], &[0.5, 0.5]]);
        assert!(matches!(fisher_functional(&s, 2), Err(Error::DegenerateProbe)));
        assert!(matches!(
            check_point_separable(&s, 2, PointCheck::Fisher),
            Err(Error::DegenerateProbe)
        ));
    }

    #[test]
    fn single_point_is_vacuously_separable() {
        let s = cube(&[&[0.2, 0.3]]);
        let v = check_point_separable(&s, 0, PointCheck::Fisher).unwrap();
        assert!(v.separable);
        assert_eq!(v.margin, f64::INFINITY);
    }

    #[test]
    fn duplicated_probe_is_not_separable() {
        let s = cube(&[&[0.9, 0.9], &[0.1, 0.2], &[0.9, 0.9], &[0.3, 0.1]]);
        let v = check_point_separable(&s, 0, PointCheck::Fisher).unwrap();
        assert!(!v.separable);
        assert_eq!(v.violator_count, 1);
        assert_eq!(v.margin, 0.0);
    }

    #[test]
    fn antipodal_pair_event() {
        let s = sample_from(&[&[0.9, 0.0], &[-0.9, 0.0]], DistributionSpec::UnitBall).unwrap();
        let rep = check_all_pairs(&s, 0.7, false).unwrap();
        assert!(rep.all_separable());
        assert_eq!(rep.fraction_separable, 1.0);
        let angle = check_all_pairs(&s, 0.7, true).unwrap();
        assert!(angle.all_separable());
    }

    #[test]
    fn zero_norm_point_is_rejected() {
        let s = sample_from(&[&[0.0, 0.0], &[0.5, 0.0]], DistributionSpec::UnitBall).unwrap();
        assert!(matches!(check_all_pairs(&s, 0.3, false), Err(Error::DegeneratePoint(0))));
    }

    #[test]
    fn square_oracle() {
        let corners: [&[f64]; 4] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]];
        let s = cube(&corners);
        for i in 0..4 {
            match oracle_check(&s, i).unwrap() {
                OracleVerdict::Separable { functional } => {
                    assert!((functional.eval(s.point(i)) - 1.0).abs() < 1e-9);
                    for j in (0..4).filter(|&j| j != i) {
                        assert!(functional.eval(s.point(j)) <= -1.0 + 1e-9);
                    }
                }
                other => panic!("corner {i} should be extreme: {other:?}"),
            }
        }
        let with_center = cube(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[0.5, 0.5]]);
        match oracle_check(&with_center, 4).unwrap() {
            OracleVerdict::NotSeparable { coefficients, residual } => {
                assert!(residual <= 1e-8);
                assert_eq!(coefficients[4], 0.0);
                let total: f64 = coefficients.iter().sum();
                assert!((total - 1.0).abs() < 1e-9);
                // the center is a convex combination of the corners
                let x: f64 = (0..4).map(|j| coefficients[j] * with_center.point(j)[0]).sum();
                let y: f64 = (0..4).map(|j| coefficients[j] * with_center.point(j)[1]).sum();
                assert!((x - 0.5).abs() < 1e-9 && (y - 0.5).abs() < 1e-9);
            }
            other => panic!("center is interior: {other:?}"),
        }
    }

    #[test]
    fn oracle_size_guard() {
        let s = sample_ball(51, 10, 0).unwrap();
        assert!(matches!(oracle_check(&s, 0), Err(Error::OracleTooLarge { .. })));
    }

    #[test]
    fn cascade_without_violators() {
        let s = sample_from(&[&[1.0, 0.0], &[0.0, 0.9], &[-0.5, 0.2]], DistributionSpec::UnitBall).unwrap();
        let sep = cascade_separate(&s, 0, 0.7).unwrap();
        assert!(sep.violators.is_empty());
        assert_eq!(sep.second, LinearFunctional::accept_all(2));
        assert!(sep.accepts(s.point(0)));
        assert!(!sep.accepts(s.point(1)) && !sep.accepts(s.point(2)));
    }

    #[test]
    fn cascade_two_dimensional_violator() {
        let s = sample_from(&[&[1.0, 0.0], &[0.9, 0.1], &[0.0, -0.8]], DistributionSpec::UnitBall).unwrap();
        let sep = cascade_separate(&s, 0, 0.7).unwrap();
        assert_eq!(sep.violators, vec![1]);
        assert!(dot(sep.second.weights(), &[1.0, 0.0]).abs() <= 1e-10);
        assert!(sep.accepts(s.point(0)));
        assert!(!sep.accepts(s.point(1)));
        assert!(!sep.accepts(s.point(2)));
    }

    #[test]
    fn cascade_errors() {
        let inside = sample_from(&[&[0.5, 0.0], &[0.0, 0.9]], DistributionSpec::UnitBall).unwrap();
        assert!(matches!(cascade_separate(&inside, 0, 0.7), Err(Error::ProbeNotInLayer { .. })));
        let crowded = sample_from(&[&[1.0, 0.0], &[0.9, 0.1], &[0.9, -0.1]], DistributionSpec::UnitBall).unwrap();
        assert!(matches!(
            cascade_separate(&crowded, 0, 0.7),
            Err(Error::TooManyViolators { count: 2, limit: 1 })
        ));
    }

    #[test]
    fn report_json_keeps_infinite_margin() {
        let s = cube(&[&[0.2, 0.3]]);
        let rep = check_probes(&s, &[0], PointCheck::Fisher).unwrap();
        let json = rep.to_json().unwrap();
        assert!(json.contains("\"inf\""));
        assert!(json.contains("\"check_kind\": \"fisher\""));
        let back: SeparationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.per_point[0].margin, f64::INFINITY);
    }
}
