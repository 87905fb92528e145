//! Python bindings: exposes trajectory synthesis, the hat/vee/exp/log maps,
//! the closed-form baseline and the trained encoder as a `lierec_py`
//! extension module. Matrices cross the boundary as nested row lists,
//! algebra vectors as flat lists.

use std::path::PathBuf;
use std::str::FromStr;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lierec_core::encoder::{train_pipeline, EncoderModel, EpochLoss, OptimizerKind, TrainConfig};
use lierec_core::lie::{AlgebraVector, GroupElement, GroupKind};
use lierec_core::matrix::Matrix;
use lierec_core::preprocess::to_increments;
use lierec_core::rng::substream;
use lierec_core::synth::{self, SamplingConfig};
use lierec_core::{baseline, io};

/// Data errors become ValueError, numerical failures RuntimeError.
fn to_py_err(e: lierec_core::Error) -> PyErr {
    if e.is_data_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_kind(kind: &str) -> PyResult<GroupKind> {
    GroupKind::from_str(kind).map_err(to_py_err)
}

fn parse_optimizer(name: &str) -> PyResult<OptimizerKind> {
    match name {
        "adam" => Ok(OptimizerKind::Adam),
        "sgd" => Ok(OptimizerKind::Sgd),
        other => Err(PyValueError::new_err(format!(
            "unknown optimizer '{other}' (expected 'adam' or 'sgd')"
        ))),
    }
}

fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> PyResult<Matrix> {
    let n = rows.len();
    let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
    let cols = if n == 0 { 0 } else { flat.len() / n };
    Matrix::new(n, cols, flat).map_err(to_py_err)
}

/// A sampled pose sequence with its ground-truth generator.
#[pyclass(name = "Trajectory")]
#[derive(Clone)]
struct PyTrajectory {
    inner: synth::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    /// Group name: "se2" | "se3" | "so3" | "sl2r".
    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps()
    }

    #[getter]
    fn noise_sigma(&self) -> f64 {
        self.inner.noise_sigma
    }

    /// Ground-truth generator coordinates.
    #[getter]
    fn true_xi(&self) -> Vec<f64> {
        self.inner.true_xi.coords().to_vec()
    }

    /// All poses as row-major nested lists, identity first.
    #[getter]
    fn poses(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner
            .poses
            .iter()
            .map(|p| matrix_to_rows(p.matrix()))
            .collect()
    }

    /// Per-step algebra increments log(g_t^-1 g_{t+1}).
    fn increments(&self) -> PyResult<Vec<Vec<f64>>> {
        let seq = to_increments(&self.inner).map_err(to_py_err)?;
        Ok(seq.increments.iter().map(|v| v.coords().to_vec()).collect())
    }

    /// Closed-form generator estimate: mean increment divided by dt.
    fn baseline_estimate(&self) -> PyResult<Vec<f64>> {
        baseline::estimate_mean_increment(&self.inner)
            .map(|v| v.coords().to_vec())
            .map_err(to_py_err)
    }

    /// Builds a trajectory from explicit poses (e.g. external data).
    /// `true_xi` may be omitted when the generator is unknown.
    #[staticmethod]
    #[pyo3(signature = (kind, dt, poses, true_xi=None))]
    fn from_poses(
        kind: &str,
        dt: f64,
        poses: Vec<Vec<Vec<f64>>>,
        true_xi: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let kind = parse_kind(kind)?;
        let elements = poses
            .iter()
            .map(|rows| GroupElement::new(kind, rows_to_matrix(rows)?).map_err(to_py_err))
            .collect::<PyResult<Vec<_>>>()?;
        if elements.len() < 2 {
            return Err(PyValueError::new_err("need at least two poses"));
        }
        let xi = match true_xi {
            Some(coords) => AlgebraVector::new(kind, coords).map_err(to_py_err)?,
            None => AlgebraVector::zero(kind),
        };
        Ok(PyTrajectory {
            inner: synth::Trajectory {
                kind,
                dt,
                poses: elements,
                true_xi: xi,
                noise_sigma: 0.0,
            },
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Trajectory(kind='{}', steps={}, dt={})",
            self.inner.kind,
            self.inner.steps(),
            self.inner.dt
        )
    }

    fn __len__(&self) -> usize {
        self.inner.poses.len()
    }
}

/// Trained increment-to-generator encoder.
#[pyclass(name = "Encoder")]
struct PyEncoder {
    model: EncoderModel,
    history: Vec<EpochLoss>,
}

#[pymethods]
impl PyEncoder {
    /// Trains an encoder on a list of trajectories (90/10 train/validation
    /// split, statistics fit on the training portion).
    #[staticmethod]
    #[pyo3(signature = (
        trajectories,
        hidden=(64, 64),
        epochs=50,
        lr=1e-3,
        batch=64,
        seed=0,
        optimizer="adam"
    ))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        trajectories: Vec<PyTrajectory>,
        hidden: (usize, usize),
        epochs: usize,
        lr: f64,
        batch: usize,
        seed: u64,
        optimizer: &str,
    ) -> PyResult<Self> {
        let config = TrainConfig {
            learning_rate: lr,
            batch_size: batch,
            epochs,
            optimizer: parse_optimizer(optimizer)?,
            seed,
            ..TrainConfig::default()
        };
        let inner: Vec<synth::Trajectory> = trajectories.into_iter().map(|t| t.inner).collect();
        let (model, report) =
            train_pipeline(&inner, [hidden.0, hidden.1], &config).map_err(to_py_err)?;
        Ok(PyEncoder {
            model,
            history: report.epochs,
        })
    }

    /// Predicts the generator of a trajectory.
    fn predict(&self, trajectory: &PyTrajectory) -> PyResult<Vec<f64>> {
        self.model
            .predict_generator(&trajectory.inner)
            .map(|v| v.coords().to_vec())
            .map_err(to_py_err)
    }

    /// Per-epoch (epoch, train_loss, val_loss) tuples; empty for a loaded
    /// checkpoint.
    fn history(&self) -> Vec<(usize, f64, f64)> {
        self.history
            .iter()
            .map(|e| (e.epoch, e.train_loss, e.val_loss))
            .collect()
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::write_model(&self.model, &path).map_err(to_py_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let model = io::read_model(&path).map_err(to_py_err)?;
        Ok(PyEncoder {
            model,
            history: Vec::new(),
        })
    }

    #[getter]
    fn kind(&self) -> String {
        self.model.kind.to_string()
    }

    #[getter]
    fn input_dim(&self) -> usize {
        self.model.input_dim
    }

    #[getter]
    fn hidden_dims(&self) -> (usize, usize) {
        (self.model.hidden_dims[0], self.model.hidden_dims[1])
    }

    fn __repr__(&self) -> String {
        format!(
            "Encoder(kind='{}', input_dim={}, hidden={:?})",
            self.model.kind, self.model.input_dim, self.model.hidden_dims
        )
    }
}

/// hat map: algebra coordinates to the algebra matrix.
#[pyfunction]
fn hat(kind: &str, coords: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let v = AlgebraVector::new(parse_kind(kind)?, coords).map_err(to_py_err)?;
    Ok(matrix_to_rows(&v.hat()))
}

/// vee map: algebra matrix back to coordinates.
#[pyfunction]
fn vee(kind: &str, matrix: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let m = rows_to_matrix(&matrix)?;
    AlgebraVector::vee(parse_kind(kind)?, &m)
        .map(|v| v.coords().to_vec())
        .map_err(to_py_err)
}

/// Group exponential of algebra coordinates.
#[pyfunction]
fn group_exp(kind: &str, coords: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let v = AlgebraVector::new(parse_kind(kind)?, coords).map_err(to_py_err)?;
    Ok(matrix_to_rows(v.exp().matrix()))
}

/// Group logarithm of a group element (inside the injectivity region).
#[pyfunction]
fn group_log(kind: &str, matrix: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let kind = parse_kind(kind)?;
    let g = GroupElement::new(kind, rows_to_matrix(&matrix)?).map_err(to_py_err)?;
    g.log().map(|v| v.coords().to_vec()).map_err(to_py_err)
}

/// Dynamical regime of an sl2r generator: "elliptic" | "hyperbolic" |
/// "parabolic".
#[pyfunction]
fn classify_regime(coords: Vec<f64>) -> PyResult<String> {
    let v = AlgebraVector::new(GroupKind::Sl2r, coords).map_err(to_py_err)?;
    v.regime().map(|r| r.to_string()).map_err(to_py_err)
}

fn config_for(
    kind: GroupKind,
    dt: f64,
    steps: usize,
    bound: f64,
    sigma: f64,
    seed: u64,
) -> SamplingConfig {
    SamplingConfig {
        kind,
        bound_a: bound,
        dt,
        steps,
        noise_sigma: sigma,
        seed,
    }
}

/// Noise-free rollout of `g_{t+1} = g_t * exp(dt * xi)` from the identity.
#[pyfunction]
#[pyo3(signature = (kind, xi, dt=0.1, steps=20))]
fn generate_clean(kind: &str, xi: Vec<f64>, dt: f64, steps: usize) -> PyResult<PyTrajectory> {
    let kind = parse_kind(kind)?;
    let xi = AlgebraVector::new(kind, xi).map_err(to_py_err)?;
    let config = config_for(kind, dt, steps, 1.0, 0.0, 0);
    synth::generate_clean(&xi, &config)
        .map(|inner| PyTrajectory { inner })
        .map_err(to_py_err)
}

/// Rollout with an independent Gaussian generator perturbation per step.
#[pyfunction]
#[pyo3(signature = (kind, xi, sigma, dt=0.1, steps=20, seed=0))]
fn generate_noisy(
    kind: &str,
    xi: Vec<f64>,
    sigma: f64,
    dt: f64,
    steps: usize,
    seed: u64,
) -> PyResult<PyTrajectory> {
    let kind = parse_kind(kind)?;
    let xi = AlgebraVector::new(kind, xi).map_err(to_py_err)?;
    let config = config_for(kind, dt, steps, 1.0, sigma, seed);
    let mut rng = substream(seed, 0);
    synth::generate_noisy(&xi, &config, &mut rng)
        .map(|inner| PyTrajectory { inner })
        .map_err(to_py_err)
}

/// Samples `n` trajectories with uniform generators, one RNG substream per
/// index; fully determined by `seed`.
#[pyfunction]
#[pyo3(signature = (kind, n, steps=20, dt=0.1, bound=1.0, sigma=0.0, seed=0))]
fn generate_dataset(
    kind: &str,
    n: usize,
    steps: usize,
    dt: f64,
    bound: f64,
    sigma: f64,
    seed: u64,
) -> PyResult<Vec<PyTrajectory>> {
    let config = config_for(parse_kind(kind)?, dt, steps, bound, sigma, seed);
    synth::generate_dataset(&config, n)
        .map(|ts| ts.into_iter().map(|inner| PyTrajectory { inner }).collect())
        .map_err(to_py_err)
}

/// Writes trajectories to a .ljd dataset file.
#[pyfunction]
#[pyo3(signature = (path, trajectories, bound=1.0, seed=0))]
fn write_dataset(
    path: PathBuf,
    trajectories: Vec<PyTrajectory>,
    bound: f64,
    seed: u64,
) -> PyResult<()> {
    let first = trajectories
        .first()
        .ok_or_else(|| PyValueError::new_err("cannot write an empty dataset without a kind"))?;
    let config = config_for(
        first.inner.kind,
        first.inner.dt,
        first.inner.steps(),
        bound,
        first.inner.noise_sigma,
        seed,
    );
    let inner: Vec<synth::Trajectory> = trajectories.into_iter().map(|t| t.inner).collect();
    io::write_dataset(&inner, &config, &path).map_err(to_py_err)
}

/// Reads a .ljd dataset file.
#[pyfunction]
fn read_dataset(path: PathBuf) -> PyResult<Vec<PyTrajectory>> {
    io::read_dataset(&path)
        .map(|ds| {
            ds.trajectories
                .into_iter()
                .map(|inner| PyTrajectory { inner })
                .collect()
        })
        .map_err(to_py_err)
}

#[pymodule]
fn lierec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyEncoder>()?;
    m.add_function(wrap_pyfunction!(hat, m)?)?;
    m.add_function(wrap_pyfunction!(vee, m)?)?;
    m.add_function(wrap_pyfunction!(group_exp, m)?)?;
    m.add_function(wrap_pyfunction!(group_log, m)?)?;
    m.add_function(wrap_pyfunction!(classify_regime, m)?)?;
    m.add_function(wrap_pyfunction!(generate_clean, m)?)?;
    m.add_function(wrap_pyfunction!(generate_noisy, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(write_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(read_dataset, m)?)?;
    m.add("GROUPS", vec!["se2", "se3", "so3", "sl2r"])?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
