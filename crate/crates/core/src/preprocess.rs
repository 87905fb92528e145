//! Conversion of trajectories into normalized, flattened feature vectors.
//!
//! A trajectory of `T + 1` poses becomes `T` algebra increments
//! `log(g_t^-1 g_{t+1})`. Normalization subtracts the pooled coordinate-wise
//! mean and divides by one scalar scale: the root-mean-square Euclidean
//! deviation over all pooled increments (not a per-coordinate scale).
//! Statistics are fit on the training split only and frozen afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, GroupKind};
use crate::synth::Trajectory;

/// Per-step displacements of a single trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSequence {
    pub kind: GroupKind,
    pub dt: f64,
    pub increments: Vec<AlgebraVector>,
}

/// Pooled dataset statistics: coordinate-wise mean and one scalar scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub sigma: f64,
    /// Number of increment vectors pooled when fitting.
    pub count: usize,
}

/// Flattened normalized increments, increment-major: entry `t * dim + j`
/// holds coordinate `j` of increment `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature vector entry".into()));
        }
        Ok(FeatureVector { values })
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Extracts the increment sequence `log(g_t^-1 g_{t+1})` of a trajectory.
/// On clean data every increment equals `dt * xi` to rounding.
pub fn to_increments(traj: &Trajectory) -> Result<IncrementSequence> {
    let mut increments = Vec::with_capacity(traj.steps());
    for t in 0..traj.steps() {
        let rel = traj.poses[t].inverse()?.compose(&traj.poses[t + 1])?;
        let inc = rel.log().map_err(|e| {
            Error::BranchCut(format!("increment at step {t} is not loggable: {e}"))
        })?;
        increments.push(inc);
    }
    Ok(IncrementSequence {
        kind: traj.kind,
        dt: traj.dt,
        increments,
    })
}

/// Pools every increment of every sequence and fits the normalization
/// statistics: coordinate-wise mean, then the scalar RMS Euclidean
/// deviation sqrt(mean ||delta - mu||^2).
pub fn fit_stats(dataset: &[IncrementSequence]) -> Result<NormalizationStats> {
    let kind = dataset
        .first()
        .ok_or_else(|| Error::InvalidConfig("cannot fit statistics on an empty dataset".into()))?
        .kind;
    let dim = kind.algebra_dim();
    let mut count = 0usize;
    let mut mean = vec![0.0; dim];
    for seq in dataset {
        if seq.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind,
                actual: seq.kind,
            });
        }
        for inc in &seq.increments {
            for (m, x) in mean.iter_mut().zip(inc.coords()) {
                *m += x;
            }
            count += 1;
        }
    }
    if count < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 pooled increments to fit statistics, got {count}"
        )));
    }
    for m in mean.iter_mut() {
        *m /= count as f64;
    }
    let mut sq_sum = 0.0;
    for seq in dataset {
        for inc in &seq.increments {
            for (m, x) in mean.iter().zip(inc.coords()) {
                let d = x - m;
                sq_sum += d * d;
            }
        }
    }
    let sigma = (sq_sum / count as f64).sqrt();
    if sigma < 1e-12 {
        return Err(Error::ZeroVariance);
    }
    Ok(NormalizationStats { mean, sigma, count })
}

/// Normalizes each increment as `(delta - mu) / sigma` and flattens
/// increment-major into one feature vector of length `T * dim`.
pub fn normalize(seq: &IncrementSequence, stats: &NormalizationStats) -> Result<FeatureVector> {
    let dim = seq.kind.algebra_dim();
    if stats.mean.len() != dim {
        return Err(Error::DimMismatch(format!(
            "statistics have dimension {}, increments have {dim}",
            stats.mean.len()
        )));
    }
    if !(stats.sigma > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "normalization scale must be positive, got {}",
            stats.sigma
        )));
    }
    let mut values = Vec::with_capacity(seq.increments.len() * dim);
    for inc in &seq.increments {
        for (x, m) in inc.coords().iter().zip(&stats.mean) {
            values.push((x - m) / stats.sigma);
        }
    }
    FeatureVector::new(values)
}

/// Inverts [`normalize`]: rebuilds the increment sequence from a flattened
/// feature vector.
pub fn denormalize(
    features: &FeatureVector,
    stats: &NormalizationStats,
    kind: GroupKind,
    dt: f64,
) -> Result<IncrementSequence> {
    let dim = kind.algebra_dim();
    if features.len() % dim != 0 {
        return Err(Error::DimMismatch(format!(
            "feature length {} is not a multiple of the algebra dimension {dim}",
            features.len()
        )));
    }
    let increments = features
        .values()
        .chunks(dim)
        .map(|chunk| {
            let coords = chunk
                .iter()
                .zip(&stats.mean)
                .map(|(v, m)| v * stats.sigma + m)
                .collect();
            AlgebraVector::new(kind, coords)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IncrementSequence {
        kind,
        dt,
        increments,
    })
}
