//! Synthesis of discrete exponential-flow trajectories.
//!
//! A trajectory starts at the identity and advances by a fixed step
//! `g_{t+1} = g_t * exp(dt * xi)`, optionally with an independent Gaussian
//! perturbation of the generator at every step. Generation is a pure
//! function of the configuration seed: trajectory `i` of a dataset draws
//! from `substream(seed, i)`, so datasets are reproducible element-wise and
//! independent of generation order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, GroupElement, GroupKind};
use crate::rng::{substream, SplitMix64};

/// Rotation-like step magnitudes must stay below half of this (the
/// logarithm's branch cut sits at pi).
const INJECTIVITY_MARGIN: f64 = std::f64::consts::PI;

/// Parameters controlling generator sampling and trajectory synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub kind: GroupKind,
    /// Per-coordinate uniform bound: generators are drawn from [-a, a]^n.
    pub bound_a: f64,
    /// Sampling interval in seconds.
    pub dt: f64,
    /// Number of steps; a trajectory has `steps + 1` poses.
    pub steps: usize,
    /// Standard deviation of the per-step Gaussian generator perturbation.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SamplingConfig {
    /// Defaults that keep per-step increments far inside the loggable
    /// region for every group and train in minutes on one core.
    pub fn defaults(kind: GroupKind, seed: u64) -> Self {
        SamplingConfig {
            kind,
            bound_a: 1.0,
            dt: 0.1,
            steps: 20,
            noise_sigma: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bound_a > 0.0) || !self.bound_a.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "bound_a must be positive, got {}",
                self.bound_a
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.bound_a * self.dt >= 0.5 * INJECTIVITY_MARGIN {
            return Err(Error::InvalidConfig(format!(
                "bound_a * dt = {} leaves no margin to the logarithm branch cut \
                 (must be below {})",
                self.bound_a * self.dt,
                0.5 * INJECTIVITY_MARGIN
            )));
        }
        Ok(())
    }
}

/// A sampled pose sequence together with the generator that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: GroupKind,
    pub dt: f64,
    /// `steps + 1` poses; the first is always the identity.
    pub poses: Vec<GroupElement>,
    /// Ground-truth generator.
    pub true_xi: AlgebraVector,
    pub noise_sigma: f64,
}

impl Trajectory {
    /// Number of steps (poses - 1).
    pub fn steps(&self) -> usize {
        self.poses.len() - 1
    }
}

/// Noisy trajectory plus the per-step generators that were actually applied
/// (xi + eps_t); lets tests compare recovered increments against the exact
/// injected values.
#[derive(Debug, Clone)]
pub struct TracedTrajectory {
    pub trajectory: Trajectory,
    pub step_generators: Vec<AlgebraVector>,
}

/// Draws a generator with i.i.d. Uniform[-a, a] coordinates.
pub fn sample_generator(config: &SamplingConfig, rng: &mut SplitMix64) -> AlgebraVector {
    let dim = config.kind.algebra_dim();
    let coords = (0..dim)
        .map(|_| rng.uniform(-config.bound_a, config.bound_a))
        .collect();
    AlgebraVector::new(config.kind, coords).expect("uniform draw is finite")
}

/// Rolls out `g_{t+1} = g_t * exp(dt * xi)` from the identity.
pub fn generate_clean(xi: &AlgebraVector, config: &SamplingConfig) -> Result<Trajectory> {
    config.validate()?;
    if xi.kind() != config.kind {
        return Err(Error::KindMismatch {
            expected: config.kind,
            actual: xi.kind(),
        });
    }
    let step = xi.scaled(config.dt).exp();
    // reject steps whose increment cannot be recovered later
    step.log().map_err(|e| {
        Error::BranchCut(format!("per-step increment is outside the loggable region: {e}"))
    })?;
    let mut poses = Vec::with_capacity(config.steps + 1);
    poses.push(GroupElement::identity(config.kind));
    for _ in 0..config.steps {
        let next = poses.last().expect("non-empty").compose(&step)?;
        poses.push(next.renormalized()?);
    }
    Ok(Trajectory {
        kind: config.kind,
        dt: config.dt,
        poses,
        true_xi: xi.clone(),
        noise_sigma: 0.0,
    })
}

/// Rolls out `g_{t+1} = g_t * exp(dt * (xi + eps_t))` with
/// `eps_t ~ N(0, sigma^2 I)` drawn from `rng`, recording each perturbed
/// generator.
pub fn generate_noisy_traced(
    xi: &AlgebraVector,
    config: &SamplingConfig,
    rng: &mut SplitMix64,
) -> Result<TracedTrajectory> {
    config.validate()?;
    if xi.kind() != config.kind {
        return Err(Error::KindMismatch {
            expected: config.kind,
            actual: xi.kind(),
        });
    }
    let dim = config.kind.algebra_dim();
    let mut poses = Vec::with_capacity(config.steps + 1);
    poses.push(GroupElement::identity(config.kind));
    let mut step_generators = Vec::with_capacity(config.steps);
    for t in 0..config.steps {
        let noise: Vec<f64> = (0..dim)
            .map(|_| config.noise_sigma * rng.next_gaussian())
            .collect();
        let perturbed = xi
            .add(&AlgebraVector::new(config.kind, noise)?)
            .expect("same kind");
        let step = perturbed.scaled(config.dt).exp();
        step.log().map_err(|e| {
            Error::BranchCut(format!(
                "perturbed increment at step {t} is outside the loggable region: {e}"
            ))
        })?;
        let next = poses.last().expect("non-empty").compose(&step)?;
        poses.push(next.renormalized()?);
        step_generators.push(perturbed);
    }
    Ok(TracedTrajectory {
        trajectory: Trajectory {
            kind: config.kind,
            dt: config.dt,
            poses,
            true_xi: xi.clone(),
            noise_sigma: config.noise_sigma,
        },
        step_generators,
    })
}

/// [`generate_noisy_traced`] without the noise record.
pub fn generate_noisy(
    xi: &AlgebraVector,
    config: &SamplingConfig,
    rng: &mut SplitMix64,
) -> Result<Trajectory> {
    generate_noisy_traced(xi, config, rng).map(|traced| traced.trajectory)
}

/// Generates `count` independent trajectories. Trajectory `i` uses
/// `substream(config.seed, i)` for both its generator draw and its noise,
/// so the result does not depend on iteration order.
pub fn generate_dataset(config: &SamplingConfig, count: usize) -> Result<Vec<Trajectory>> {
    config.validate()?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = substream(config.seed, i as u64);
        let xi = sample_generator(config, &mut rng);
        let traj = if config.noise_sigma > 0.0 {
            generate_noisy(&xi, config, &mut rng)?
        } else {
            generate_clean(&xi, config)?
        };
        out.push(traj);
    }
    Ok(out)
}
