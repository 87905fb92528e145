//! Learned inverse map from normalized increment features to the generator.
//!
//! The encoder is a two-hidden-layer ReLU network with a linear output,
//! trained to minimize the squared Euclidean distance to the true generator.
//! Forward, backward and the optimizers are written out directly; gradients
//! are checked against central finite differences in the tests. Training is
//! bitwise deterministic for a fixed seed: initialization, shuffling and
//! gradient accumulation all use fixed orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, GroupKind};
use crate::preprocess::{fit_stats, normalize, to_increments, FeatureVector, NormalizationStats};
use crate::rng::{substream, SplitMix64};
use crate::synth::Trajectory;

/// Weights and frozen preprocessing statistics of a trained encoder.
///
/// Weight matrices are row-major with shape (out, in): `w1` is `h1 x input`,
/// `w2` is `h2 x h1`, `w3` is `output x h2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderModel {
    pub kind: GroupKind,
    pub input_dim: usize,
    pub hidden_dims: [usize; 2],
    pub output_dim: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub w3: Vec<f64>,
    pub b3: Vec<f64>,
    pub stats: NormalizationStats,
}

impl EncoderModel {
    /// Glorot-style initialization: each layer's weights are uniform with
    /// bound sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn init(
        kind: GroupKind,
        input_dim: usize,
        hidden_dims: [usize; 2],
        stats: NormalizationStats,
        rng: &mut SplitMix64,
    ) -> Result<Self> {
        let output_dim = kind.algebra_dim();
        let [h1, h2] = hidden_dims;
        if input_dim == 0 || h1 == 0 || h2 == 0 {
            return Err(Error::InvalidConfig(
                "encoder dimensions must be positive".into(),
            ));
        }
        let mut layer = |fan_out: usize, fan_in: usize| -> Vec<f64> {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            (0..fan_out * fan_in)
                .map(|_| rng.uniform(-bound, bound))
                .collect()
        };
        let model = EncoderModel {
            kind,
            input_dim,
            hidden_dims,
            output_dim,
            w1: layer(h1, input_dim),
            b1: vec![0.0; h1],
            w2: layer(h2, h1),
            b2: vec![0.0; h2],
            w3: layer(output_dim, h2),
            b3: vec![0.0; output_dim],
            stats,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks the shape consistency invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        let [h1, h2] = self.hidden_dims;
        let shapes = [
            ("w1", self.w1.len(), h1 * self.input_dim),
            ("b1", self.b1.len(), h1),
            ("w2", self.w2.len(), h2 * h1),
            ("b2", self.b2.len(), h2),
            ("w3", self.w3.len(), self.output_dim * h2),
            ("b3", self.b3.len(), self.output_dim),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::DimMismatch(format!(
                    "{name} has {got} entries, expected {want}"
                )));
            }
        }
        if self.output_dim != self.kind.algebra_dim() {
            return Err(Error::DimMismatch(format!(
                "output dimension {} does not match {} algebra dimension {}",
                self.output_dim,
                self.kind,
                self.kind.algebra_dim()
            )));
        }
        if self.input_dim % self.kind.algebra_dim() != 0 {
            return Err(Error::DimMismatch(format!(
                "input dimension {} is not a multiple of the algebra dimension {}",
                self.input_dim,
                self.kind.algebra_dim()
            )));
        }
        if self.stats.mean.len() != self.kind.algebra_dim() {
            return Err(Error::DimMismatch(format!(
                "stored statistics have dimension {}, expected {}",
                self.stats.mean.len(),
                self.kind.algebra_dim()
            )));
        }
        if !(self.stats.sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "stored normalization scale must be positive, got {}",
                self.stats.sigma
            )));
        }
        let all = [&self.w1, &self.b1, &self.w2, &self.b2, &self.w3, &self.b3];
        if all.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite("encoder weight".into()));
        }
        Ok(())
    }

    /// Evaluates `w3 relu(w2 relu(w1 x + b1) + b2) + b3`.
    pub fn forward(&self, x: &FeatureVector) -> Result<AlgebraVector> {
        if x.len() != self.input_dim {
            return Err(Error::DimMismatch(format!(
                "encoder expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        let trace = self.forward_trace(x.values());
        AlgebraVector::new(self.kind, trace.output)
    }

    fn forward_trace(&self, x: &[f64]) -> ForwardTrace {
        let [h1, h2] = self.hidden_dims;
        let a1 = affine_relu(&self.w1, &self.b1, x, h1, self.input_dim);
        let a2 = affine_relu(&self.w2, &self.b2, &a1, h2, h1);
        let output = affine(&self.w3, &self.b3, &a2, self.output_dim, h2);
        ForwardTrace { a1, a2, output }
    }

    /// End-to-end inference: increments, frozen normalization, forward pass.
    pub fn predict_generator(&self, traj: &Trajectory) -> Result<AlgebraVector> {
        if traj.kind != self.kind {
            return Err(Error::KindMismatch {
                expected: self.kind,
                actual: traj.kind,
            });
        }
        let features = normalize(&to_increments(traj)?, &self.stats)?;
        self.forward(&features)
    }
}

struct ForwardTrace {
    a1: Vec<f64>,
    a2: Vec<f64>,
    output: Vec<f64>,
}

fn affine(w: &[f64], b: &[f64], x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        let row = &w[i * cols..(i + 1) * cols];
        let mut acc = b[i];
        for (wij, xj) in row.iter().zip(x) {
            acc += wij * xj;
        }
        out.push(acc);
    }
    out
}

fn affine_relu(w: &[f64], b: &[f64], x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = affine(w, b, x, rows, cols);
    for v in out.iter_mut() {
        // subgradient at exactly 0 is pinned to 0, so the mask is z > 0
        if *v <= 0.0 {
            *v = 0.0;
        }
    }
    out
}

/// Squared Euclidean distance between prediction and target.
pub fn loss_mse(pred: &AlgebraVector, target: &AlgebraVector) -> Result<f64> {
    if pred.kind() != target.kind() {
        return Err(Error::KindMismatch {
            expected: target.kind(),
            actual: pred.kind(),
        });
    }
    Ok(raw_loss(pred.coords(), target.coords()))
}

/// Mean of the per-sample squared errors over a batch.
pub fn batch_loss_mse(preds: &[AlgebraVector], targets: &[AlgebraVector]) -> Result<f64> {
    if preds.len() != targets.len() || preds.is_empty() {
        return Err(Error::DimMismatch(format!(
            "batch sizes differ or are empty: {} predictions, {} targets",
            preds.len(),
            targets.len()
        )));
    }
    let mut total = 0.0;
    for (p, t) in preds.iter().zip(targets) {
        total += loss_mse(p, t)?;
    }
    Ok(total / preds.len() as f64)
}

fn raw_loss(pred: &[f64], target: &[f64]) -> f64 {
    pred.iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum()
}

/// Loss gradients with the same shapes as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub w3: Vec<f64>,
    pub b3: Vec<f64>,
}

impl Gradients {
    fn zeros_like(model: &EncoderModel) -> Self {
        Gradients {
            w1: vec![0.0; model.w1.len()],
            b1: vec![0.0; model.b1.len()],
            w2: vec![0.0; model.w2.len()],
            b2: vec![0.0; model.b2.len()],
            w3: vec![0.0; model.w3.len()],
            b3: vec![0.0; model.b3.len()],
        }
    }

    fn scale(&mut self, s: f64) {
        for v in self.parts_mut() {
            for x in v.iter_mut() {
                *x *= s;
            }
        }
    }

    fn parts_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            &mut self.b2,
            &mut self.w3,
            &mut self.b3,
        ]
    }
}

/// Exact gradient of the squared-error loss for one sample, by the chain
/// rule through both ReLU layers.
pub fn backward(model: &EncoderModel, x: &FeatureVector, target: &AlgebraVector) -> Result<Gradients> {
    if target.kind() != model.kind {
        return Err(Error::KindMismatch {
            expected: model.kind,
            actual: target.kind(),
        });
    }
    if x.len() != model.input_dim {
        return Err(Error::DimMismatch(format!(
            "encoder expects {} inputs, got {}",
            model.input_dim,
            x.len()
        )));
    }
    let mut grads = Gradients::zeros_like(model);
    accumulate_gradients(model, x.values(), target.coords(), &mut grads);
    Ok(grads)
}

/// Adds this sample's gradient into `grads`; returns the sample loss.
fn accumulate_gradients(
    model: &EncoderModel,
    x: &[f64],
    target: &[f64],
    grads: &mut Gradients,
) -> f64 {
    let [h1, h2] = model.hidden_dims;
    let trace = model.forward_trace(x);
    let loss = raw_loss(&trace.output, target);

    // d loss / d output
    let dy: Vec<f64> = trace
        .output
        .iter()
        .zip(target)
        .map(|(y, t)| 2.0 * (y - t))
        .collect();

    // output layer
    for i in 0..model.output_dim {
        grads.b3[i] += dy[i];
        let row = &mut grads.w3[i * h2..(i + 1) * h2];
        for (g, a) in row.iter_mut().zip(&trace.a2) {
            *g += dy[i] * a;
        }
    }

    // second hidden layer: da2 = w3^T dy, masked by the ReLU
    let mut dz2 = vec![0.0; h2];
    for i in 0..model.output_dim {
        let row = &model.w3[i * h2..(i + 1) * h2];
        for (d, w) in dz2.iter_mut().zip(row) {
            *d += w * dy[i];
        }
    }
    for (d, a) in dz2.iter_mut().zip(&trace.a2) {
        if *a <= 0.0 {
            *d = 0.0;
        }
    }
    for i in 0..h2 {
        grads.b2[i] += dz2[i];
        if dz2[i] != 0.0 {
            let row = &mut grads.w2[i * h1..(i + 1) * h1];
            for (g, a) in row.iter_mut().zip(&trace.a1) {
                *g += dz2[i] * a;
            }
        }
    }

    // first hidden layer
    let mut dz1 = vec![0.0; h1];
    for i in 0..h2 {
        if dz2[i] != 0.0 {
            let row = &model.w2[i * h1..(i + 1) * h1];
            for (d, w) in dz1.iter_mut().zip(row) {
                *d += w * dz2[i];
            }
        }
    }
    for (d, a) in dz1.iter_mut().zip(&trace.a1) {
        if *a <= 0.0 {
            *d = 0.0;
        }
    }
    for i in 0..h1 {
        grads.b1[i] += dz1[i];
        if dz1[i] != 0.0 {
            let row = &mut grads.w1[i * model.input_dim..(i + 1) * model.input_dim];
            for (g, xj) in row.iter_mut().zip(x) {
                *g += dz1[i] * xj;
            }
        }
    }

    loss
}

/// Optimizer choice; adaptive moments is the default, plain gradient
/// descent is kept for ablation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl std::fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub optimizer: OptimizerKind,
    pub adam_betas: (f64, f64),
    pub adam_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 64,
            epochs: 50,
            optimizer: OptimizerKind::Adam,
            adam_betas: (0.9, 0.999),
            adam_epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Default hidden widths.
pub const DEFAULT_HIDDEN: [usize; 2] = [64, 64];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Per-epoch loss curve plus the validation error of the final weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochLoss>,
    /// Mean absolute error per generator coordinate on the validation split
    /// (on the training data when no validation split exists).
    pub val_component_error: Vec<f64>,
}

impl TrainReport {
    pub fn final_train_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.train_loss)
    }

    pub fn final_val_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.val_loss)
    }
}

struct AdamState {
    m: Gradients,
    v: Gradients,
    step: u64,
}

/// Trains on pre-normalized feature/target pairs.
///
/// `val` may be empty; validation losses then mirror the training loss.
/// The caller is responsible for fitting `stats` on the training portion
/// only — [`train_pipeline`] does exactly that.
pub fn train(
    train_pairs: &[(FeatureVector, AlgebraVector)],
    val_pairs: &[(FeatureVector, AlgebraVector)],
    stats: &NormalizationStats,
    hidden: [usize; 2],
    config: &TrainConfig,
) -> Result<(EncoderModel, TrainReport)> {
    config.validate()?;
    let (first_x, first_y) = train_pairs
        .first()
        .ok_or_else(|| Error::InvalidConfig("training set is empty".into()))?;
    let kind = first_y.kind();
    let input_dim = first_x.len();
    for (x, y) in train_pairs.iter().chain(val_pairs) {
        if x.len() != input_dim || y.kind() != kind {
            return Err(Error::DimMismatch(
                "inconsistent feature lengths or kinds in the dataset".into(),
            ));
        }
    }

    let mut init_rng = substream(config.seed, 0);
    let mut shuffle_rng = substream(config.seed, 1);
    let mut model = EncoderModel::init(kind, input_dim, hidden, stats.clone(), &mut init_rng)?;

    let mut adam = AdamState {
        m: Gradients::zeros_like(&model),
        v: Gradients::zeros_like(&model),
        step: 0,
    };
    let mut order: Vec<usize> = (0..train_pairs.len()).collect();
    let mut grads = Gradients::zeros_like(&model);
    let mut epochs = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        shuffle(&mut order, &mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            for part in grads.parts_mut() {
                part.iter_mut().for_each(|g| *g = 0.0);
            }
            for &idx in batch {
                let (x, y) = &train_pairs[idx];
                epoch_loss += accumulate_gradients(&model, x.values(), y.coords(), &mut grads);
            }
            grads.scale(1.0 / batch.len() as f64);
            apply_update(&mut model, &grads, &mut adam, config);
        }
        let train_loss = epoch_loss / train_pairs.len() as f64;
        if !train_loss.is_finite() {
            return Err(Error::TrainDiverged {
                epoch,
                loss: train_loss,
            });
        }
        let val_loss = if val_pairs.is_empty() {
            train_loss
        } else {
            mean_loss(&model, val_pairs)
        };
        if !val_loss.is_finite() {
            return Err(Error::TrainDiverged {
                epoch,
                loss: val_loss,
            });
        }
        epochs.push(EpochLoss {
            epoch,
            train_loss,
            val_loss,
        });
    }

    let eval_pairs = if val_pairs.is_empty() { train_pairs } else { val_pairs };
    let val_component_error = mean_component_error(&model, eval_pairs);
    Ok((
        model,
        TrainReport {
            epochs,
            val_component_error,
        },
    ))
}

/// Full training pipeline from raw trajectories: seed-pinned 90/10
/// train/validation split, statistics fit on the training split only,
/// normalization, then [`train`].
pub fn train_pipeline(
    trajectories: &[Trajectory],
    hidden: [usize; 2],
    config: &TrainConfig,
) -> Result<(EncoderModel, TrainReport)> {
    if trajectories.is_empty() {
        return Err(Error::InvalidConfig("training set is empty".into()));
    }
    let sequences = trajectories
        .iter()
        .map(to_increments)
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..sequences.len()).collect();
    // substream 2 of the seed is the split; 0 and 1 drive init and epoch
    // shuffling inside `train`
    shuffle(&mut order, &mut substream(config.seed, 2));
    let val_count = sequences.len() / 10;
    let (val_idx, train_idx) = order.split_at(val_count);

    let train_seqs: Vec<_> = train_idx.iter().map(|&i| sequences[i].clone()).collect();
    let stats = fit_stats(&train_seqs)?;

    let make_pairs = |indices: &[usize]| -> Result<Vec<(FeatureVector, AlgebraVector)>> {
        indices
            .iter()
            .map(|&i| {
                let features = normalize(&sequences[i], &stats)?;
                Ok((features, trajectories[i].true_xi.clone()))
            })
            .collect()
    };
    let train_pairs = make_pairs(train_idx)?;
    let val_pairs = make_pairs(val_idx)?;
    train(&train_pairs, &val_pairs, &stats, hidden, config)
}

fn mean_loss(model: &EncoderModel, pairs: &[(FeatureVector, AlgebraVector)]) -> f64 {
    let total: f64 = pairs
        .iter()
        .map(|(x, y)| raw_loss(&model.forward_trace(x.values()).output, y.coords()))
        .sum();
    total / pairs.len() as f64
}

fn mean_component_error(model: &EncoderModel, pairs: &[(FeatureVector, AlgebraVector)]) -> Vec<f64> {
    let dim = model.output_dim;
    let mut err = vec![0.0; dim];
    for (x, y) in pairs {
        let out = model.forward_trace(x.values()).output;
        for j in 0..dim {
            err[j] += (out[j] - y.coords()[j]).abs();
        }
    }
    for e in err.iter_mut() {
        *e /= pairs.len() as f64;
    }
    err
}

/// Fisher-Yates with a bounded draw that avoids modulo bias.
fn shuffle(order: &mut [usize], rng: &mut SplitMix64) {
    for i in (1..order.len()).rev() {
        let j = ((rng.next_u64() as u128 * (i as u128 + 1)) >> 64) as usize;
        order.swap(i, j);
    }
}

fn apply_update(model: &mut EncoderModel, grads: &Gradients, adam: &mut AdamState, config: &TrainConfig) {
    match config.optimizer {
        OptimizerKind::Sgd => {
            let lr = config.learning_rate;
            let params = [
                (&mut model.w1, &grads.w1),
                (&mut model.b1, &grads.b1),
                (&mut model.w2, &grads.w2),
                (&mut model.b2, &grads.b2),
                (&mut model.w3, &grads.w3),
                (&mut model.b3, &grads.b3),
            ];
            for (p, g) in params {
                for (pi, gi) in p.iter_mut().zip(g) {
                    *pi -= lr * gi;
                }
            }
        }
        OptimizerKind::Adam => {
            adam.step += 1;
            let (beta1, beta2) = config.adam_betas;
            let bias1 = 1.0 - beta1.powi(adam.step as i32);
            let bias2 = 1.0 - beta2.powi(adam.step as i32);
            let lr = config.learning_rate;
            let eps = config.adam_epsilon;
            let params = [
                (&mut model.w1, &grads.w1, &mut adam.m.w1, &mut adam.v.w1),
                (&mut model.b1, &grads.b1, &mut adam.m.b1, &mut adam.v.b1),
                (&mut model.w2, &grads.w2, &mut adam.m.w2, &mut adam.v.w2),
                (&mut model.b2, &grads.b2, &mut adam.m.b2, &mut adam.v.b2),
                (&mut model.w3, &grads.w3, &mut adam.m.w3, &mut adam.v.w3),
                (&mut model.b3, &grads.b3, &mut adam.m.b3, &mut adam.v.b3),
            ];
            for (p, g, m, v) in params {
                for i in 0..p.len() {
                    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                    let m_hat = m[i] / bias1;
                    let v_hat = v[i] / bias2;
                    p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
    }
}
