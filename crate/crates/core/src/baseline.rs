//! Closed-form generator recovery.
//!
//! Because the discrete flow advances by exp(dt * xi) every step, averaging
//! the logged increments and dividing by dt inverts the synthesis exactly on
//! clean data. This estimator is the correctness oracle the learned encoder
//! is compared against: on noiseless trajectories its error is rounding
//! noise, and under the i.i.d. generator perturbation it is the
//! minimum-variance average of the injected values.

use crate::error::{Error, Result};
use crate::lie::AlgebraVector;
use crate::preprocess::to_increments;
use crate::synth::Trajectory;

/// Mean logged increment divided by dt: `(1/(T dt)) * sum_t log(g_t^-1 g_{t+1})`.
pub fn estimate_mean_increment(traj: &Trajectory) -> Result<AlgebraVector> {
    let seq = to_increments(traj)?;
    let dim = traj.kind.algebra_dim();
    let mut sum = vec![0.0; dim];
    for inc in &seq.increments {
        for (s, x) in sum.iter_mut().zip(inc.coords()) {
            *s += x;
        }
    }
    let scale = 1.0 / (seq.increments.len() as f64 * traj.dt);
    AlgebraVector::new(traj.kind, sum.into_iter().map(|s| s * scale).collect())
}

/// Per-trajectory error breakdown for both estimators against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub truth: AlgebraVector,
    pub model_pred: AlgebraVector,
    pub baseline_pred: AlgebraVector,
    /// |model - truth| per coordinate.
    pub model_abs_err: Vec<f64>,
    /// |baseline - truth| per coordinate.
    pub baseline_abs_err: Vec<f64>,
    pub model_euclid_err: f64,
    pub baseline_euclid_err: f64,
}

/// Builds the error row for one trajectory's predictions.
pub fn compare(
    model_pred: &AlgebraVector,
    baseline_pred: &AlgebraVector,
    truth: &AlgebraVector,
) -> Result<ErrorRow> {
    for pred in [model_pred, baseline_pred] {
        if pred.kind() != truth.kind() {
            return Err(Error::KindMismatch {
                expected: truth.kind(),
                actual: pred.kind(),
            });
        }
    }
    let abs_err = |pred: &AlgebraVector| -> Vec<f64> {
        pred.coords()
            .iter()
            .zip(truth.coords())
            .map(|(p, t)| (p - t).abs())
            .collect()
    };
    let model_abs_err = abs_err(model_pred);
    let baseline_abs_err = abs_err(baseline_pred);
    let euclid = |errs: &[f64]| errs.iter().map(|e| e * e).sum::<f64>().sqrt();
    Ok(ErrorRow {
        truth: truth.clone(),
        model_pred: model_pred.clone(),
        baseline_pred: baseline_pred.clone(),
        model_euclid_err: euclid(&model_abs_err),
        baseline_euclid_err: euclid(&baseline_abs_err),
        model_abs_err,
        baseline_abs_err,
    })
}

/// Mean and max of the per-coordinate absolute errors over a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSummary {
    pub count: usize,
    pub model_mean: Vec<f64>,
    pub model_max: Vec<f64>,
    pub baseline_mean: Vec<f64>,
    pub baseline_max: Vec<f64>,
    pub model_mean_euclid: f64,
    pub baseline_mean_euclid: f64,
}

impl ErrorSummary {
    /// Grand mean over coordinates of the model's mean absolute error.
    pub fn model_mean_component_error(&self) -> f64 {
        self.model_mean.iter().sum::<f64>() / self.model_mean.len() as f64
    }

    pub fn baseline_mean_component_error(&self) -> f64 {
        self.baseline_mean.iter().sum::<f64>() / self.baseline_mean.len() as f64
    }
}

pub fn summarize(rows: &[ErrorRow]) -> Result<ErrorSummary> {
    let first = rows
        .first()
        .ok_or_else(|| Error::InvalidConfig("cannot summarize an empty report".into()))?;
    let dim = first.truth.coords().len();
    let mut summary = ErrorSummary {
        count: rows.len(),
        model_mean: vec![0.0; dim],
        model_max: vec![0.0; dim],
        baseline_mean: vec![0.0; dim],
        baseline_max: vec![0.0; dim],
        model_mean_euclid: 0.0,
        baseline_mean_euclid: 0.0,
    };
    for row in rows {
        for j in 0..dim {
            summary.model_mean[j] += row.model_abs_err[j];
            summary.baseline_mean[j] += row.baseline_abs_err[j];
            summary.model_max[j] = summary.model_max[j].max(row.model_abs_err[j]);
            summary.baseline_max[j] = summary.baseline_max[j].max(row.baseline_abs_err[j]);
        }
        summary.model_mean_euclid += row.model_euclid_err;
        summary.baseline_mean_euclid += row.baseline_euclid_err;
    }
    let n = rows.len() as f64;
    for j in 0..dim {
        summary.model_mean[j] /= n;
        summary.baseline_mean[j] /= n;
    }
    summary.model_mean_euclid /= n;
    summary.baseline_mean_euclid /= n;
    Ok(summary)
}
