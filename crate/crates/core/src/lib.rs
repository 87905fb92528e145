//! Recovery of constant Lie algebra generators from uniformly sampled
//! matrix Lie group trajectories.
//!
//! A flow `g(t) = g0 * exp(t * xi)` observed at fixed intervals leaves a
//! constant per-step fingerprint: every relative pose logs to `dt * xi`.
//! This crate synthesizes such trajectories on SE(2), SE(3), SO(3) and
//! SL(2,R), recovers the generator two ways — a closed-form increment
//! average that is exact on clean data, and a small trained ReLU encoder
//! that also handles noise — and persists datasets, checkpoints and
//! evaluation reports deterministically.
//!
//! Module map:
//! - [`matrix`]: small dense matrices, series exponential, exact inverses.
//! - [`lie`]: the four groups, hat/vee, closed-form exp/log, regimes.
//! - [`synth`]: seeded trajectory and dataset generation.
//! - [`preprocess`]: increments, pooled statistics, feature flattening.
//! - [`encoder`]: the MLP, backprop, optimizers, training pipeline.
//! - [`baseline`]: closed-form recovery and error reporting.
//! - [`io`]: .ljd datasets and .lem checkpoints.

pub mod baseline;
pub mod encoder;
pub mod error;
pub mod io;
pub mod lie;
pub mod matrix;
pub mod preprocess;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use lie::{AlgebraVector, GroupElement, GroupKind, Regime};
pub use synth::{SamplingConfig, Trajectory};
