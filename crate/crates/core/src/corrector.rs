//! One-shot correctors: a single linear discriminant, in whitened
//! coordinates, that reroutes one known error sample of a legacy model.
//!
//! Construction is non-iterative: one mean, one covariance factorization,
//! one sweep over the correct set. The legacy model is never modified.

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, Point, SampleSet};
use crate::gram::column_mean;
use crate::separability::LinearFunctional;
use crate::whitening::{whiten, LambdaPolicy, WhiteningTransform};

/// A deterministic decision rule being corrected.
pub trait LegacyModel {
    type Label: Clone + PartialEq;

    fn decide(&self, x: &[f64]) -> Self::Label;
}

/// Adapts a closure into a [`LegacyModel`].
pub struct FnModel<F>(pub F);

impl<F, L> LegacyModel for FnModel<F>
where
    F: Fn(&[f64]) -> L,
    L: Clone + PartialEq,
{
    type Label = L;

    fn decide(&self, x: &[f64]) -> L {
        (self.0)(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corrector<L> {
    functional: LinearFunctional,
    whitening: WhiteningTransform,
    corrected_label: L,
    source_error_point: Point,
}

impl<L> Corrector<L> {
    pub fn dim(&self) -> usize {
        self.whitening.dim()
    }

    /// The discriminant in whitened coordinates.
    pub fn functional(&self) -> &LinearFunctional {
        &self.functional
    }

    pub fn whitening(&self) -> &WhiteningTransform {
        &self.whitening
    }

    pub fn corrected_label(&self) -> &L {
        &self.corrected_label
    }

    pub fn source_error_point(&self) -> &Point {
        &self.source_error_point
    }

    /// `l(z(x))`; the corrector fires where this is positive.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(self.functional.eval(&self.whitening.apply(x)?))
    }

    pub fn fires(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? > 0.0)
    }

    /// Scores for every point of `sample`, in order.
    pub fn scores(&self, sample: &SampleSet) -> Result<Vec<f64>> {
        let z = self.whitening.apply_all(sample)?;
        let n = self.dim();
        let zm = DMatrix::from_vec(n, sample.len(), z);
        let w = DVector::from_column_slice(self.functional.weights());
        let offset = self.functional.offset();
        Ok((w.transpose() * zm).iter().map(|v| v - offset).collect())
    }
}

/// Work done by a single build; the construction never iterates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildCost {
    pub mean_passes: usize,
    pub covariance_factorizations: usize,
    /// Points of the correct set evaluated while placing the threshold.
    pub points_swept: usize,
}

/// Caches the whitening of a correct set so that many correctors can be
/// built against it.
pub struct CorrectorBuilder {
    whitening: WhiteningTransform,
    whitened: DMatrix<f64>,
    setup_cost: BuildCost,
}

impl CorrectorBuilder {
    pub fn new(correct_set: &SampleSet, whitening_on: bool) -> Result<Self> {
        Self::with_policy(correct_set, whitening_on, LambdaPolicy::Auto)
    }

    pub fn with_policy(correct_set: &SampleSet, whitening_on: bool, policy: LambdaPolicy) -> Result<Self> {
        if correct_set.is_empty() {
            return Err(Error::InsufficientData("correct set is empty".into()));
        }
        let n = correct_set.dim();
        let (whitening, setup_cost) = if whitening_on {
            let w = whiten(correct_set, policy)?;
            (
                w,
                BuildCost {
                    mean_passes: 1,
                    covariance_factorizations: 1,
                    points_swept: 0,
                },
            )
        } else {
            let mean = Point::new(column_mean(correct_set.as_slice(), n))?;
            (
                WhiteningTransform::identity(mean),
                BuildCost {
                    mean_passes: 1,
                    ..BuildCost::default()
                },
            )
        };
        let whitened = DMatrix::from_vec(n, correct_set.len(), whitening.apply_all(correct_set)?);
        Ok(CorrectorBuilder {
            whitening,
            whitened,
            setup_cost,
        })
    }

    pub fn whitening(&self) -> &WhiteningTransform {
        &self.whitening
    }

    pub fn setup_cost(&self) -> BuildCost {
        self.setup_cost
    }

    /// Builds the corrector for `error_point` together with the sweep cost.
    pub fn build_with_cost<L>(&self, error_point: &Point, corrected_label: L) -> Result<(Corrector<L>, BuildCost)> {
        let n = self.whitening.dim();
        if error_point.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: error_point.dim(),
            });
        }
        // the whitened mean is the origin, so the direction is z(err) itself
        let w = self.whitening.apply(error_point.coords())?;
        if w.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateProbe);
        }
        let at_error = dot(&w, &w);
        let wv = DVector::from_column_slice(&w);
        let max_correct = (wv.transpose() * &self.whitened).max();
        if max_correct >= at_error {
            let w_norm = at_error.sqrt();
            return Err(Error::NotSeparable {
                margin: (at_error - max_correct) / w_norm,
            });
        }
        let offset = 0.5 * (at_error + max_correct);
        let functional = LinearFunctional::new(w, offset)?;
        let cost = BuildCost {
            points_swept: self.whitened.ncols(),
            ..self.setup_cost
        };
        Ok((
            Corrector {
                functional,
                whitening: self.whitening.clone(),
                corrected_label,
                source_error_point: error_point.clone(),
            },
            cost,
        ))
    }

    pub fn build<L>(&self, error_point: &Point, corrected_label: L) -> Result<Corrector<L>> {
        Ok(self.build_with_cost(error_point, corrected_label)?.0)
    }
}

/// Builds a corrector for one error point against a set of correctly
/// handled points. The direction is the whitened `error_point - mean`; the
/// threshold sits midway between the error point and the closest correct
/// point along it.
pub fn build_corrector<L>(
    correct_set: &SampleSet,
    error_point: &Point,
    corrected_label: L,
    whitening_on: bool,
) -> Result<Corrector<L>> {
    CorrectorBuilder::new(correct_set, whitening_on)?.build(error_point, corrected_label)
}

/// Legacy label unless the corrector fires.
pub fn corrected_decision<M: LegacyModel>(
    model: &M,
    corrector: &Corrector<M::Label>,
    x: &[f64],
) -> Result<M::Label> {
    if corrector.fires(x)? {
        Ok(corrector.corrected_label.clone())
    } else {
        Ok(model.decide(x))
    }
}

/// A legacy model with a corrector on top; itself a [`LegacyModel`], so
/// correctors stack.
pub struct CorrectedModel<M: LegacyModel> {
    pub legacy: M,
    pub corrector: Corrector<M::Label>,
}

impl<M: LegacyModel> CorrectedModel<M> {
    pub fn new(legacy: M, corrector: Corrector<M::Label>) -> Self {
        CorrectedModel { legacy, corrector }
    }
}

impl<M: LegacyModel> LegacyModel for CorrectedModel<M> {
    type Label = M::Label;

    /// Panics on a dimension mismatch; use [`corrected_decision`] to get an error instead.
    fn decide(&self, x: &[f64]) -> M::Label {
        corrected_decision(&self.legacy, &self.corrector, x).expect("input dimension matches the corrector")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionAudit {
    pub true_positive: bool,
    pub false_positive_rate: f64,
    /// `min(l(err), -max l(held-out)) / |w|`, distance in whitened units from
    /// the threshold to the nearest misplaced point; negative when something
    /// lands on the wrong side.
    pub margin: f64,
}

pub fn audit_corrector<L>(corrector: &Corrector<L>, held_out_correct: &SampleSet, error_point: &Point) -> Result<CorrectionAudit> {
    if held_out_correct.is_empty() {
        return Err(Error::InsufficientData("held-out set is empty".into()));
    }
    let at_error = corrector.score(error_point.coords())?;
    let scores = corrector.scores(held_out_correct)?;
    let fired = scores.iter().filter(|&&s| s > 0.0).count();
    let worst = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(CorrectionAudit {
        true_positive: at_error > 0.0,
        false_positive_rate: fired as f64 / scores.len() as f64,
        margin: at_error.min(-worst) / corrector.functional.weight_norm(),
    })
}

#[derive(Serialize, Deserialize)]
struct WhiteningJson {
    mean: Vec<f64>,
    factor: Vec<Vec<f64>>,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct CorrectorJson<L> {
    n: usize,
    weights: Vec<f64>,
    offset: f64,
    whitening: WhiteningJson,
    corrected_label: L,
    source_error_point: Vec<f64>,
}

impl<L: Serialize + Clone> Corrector<L> {
    pub fn to_json(&self) -> Result<String> {
        let f = self.whitening.factor();
        let doc = CorrectorJson {
            n: self.dim(),
            weights: self.functional.weights().to_vec(),
            offset: self.functional.offset(),
            whitening: WhiteningJson {
                mean: self.whitening.mean().coords().to_vec(),
                factor: (0..f.nrows()).map(|i| f.row(i).iter().copied().collect()).collect(),
                lambda: self.whitening.lambda(),
            },
            corrected_label: self.corrected_label.clone(),
            source_error_point: self.source_error_point.coords().to_vec(),
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}

impl<L: DeserializeOwned> Corrector<L> {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CorrectorJson<L> = serde_json::from_str(text)?;
        let n = doc.n;
        let check = |len: usize| {
            if len == n {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: n, found: len })
            }
        };
        check(doc.weights.len())?;
        check(doc.whitening.factor.len())?;
        check(doc.source_error_point.len())?;
        for row in &doc.whitening.factor {
            check(row.len())?;
        }
        let factor = DMatrix::from_fn(n, n, |i, j| doc.whitening.factor[i][j]);
        let whitening = WhiteningTransform::from_parts(Point::new(doc.whitening.mean)?, factor, doc.whitening.lambda, f64::NAN)?;
        Ok(Corrector {
            functional: LinearFunctional::new(doc.weights, doc.offset)?,
            whitening,
            corrected_label: doc.corrected_label,
            source_error_point: Point::new(doc.source_error_point)?,
        })
    }
}
