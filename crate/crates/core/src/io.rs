//! Versioned text persistence for datasets (.ljd), encoder checkpoints
//! (.lem) and reports.
//!
//! A dataset file is line-delimited: one JSON header line, then one JSON
//! record per trajectory. Records store the true generator, all poses
//! row-major, and the precomputed increment coordinates; keeping the poses
//! lets readers re-derive increments and catch preprocessing regressions.
//! Floating-point values are written as the shortest decimal that parses
//! back to the same binary64, so read(write(x)) == x and re-runs with the
//! same seed produce byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder::EncoderModel;
use crate::error::{Error, Result};
use crate::lie::{AlgebraVector, GroupElement, GroupKind};
use crate::matrix::Matrix;
use crate::preprocess::to_increments;
use crate::synth::{SamplingConfig, Trajectory};

pub const FORMAT_VERSION: u32 = 1;

/// Dataset header: generation parameters plus the record count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format_version: u32,
    pub group: GroupKind,
    pub dt: f64,
    pub steps: usize,
    pub bound_a: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrajectoryRecord {
    true_xi: Vec<f64>,
    poses: Vec<Vec<f64>>,
    increments: Vec<Vec<f64>>,
}

/// A parsed dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub trajectories: Vec<Trajectory>,
}

fn format_err(path: &Path, line: usize, detail: impl Into<String>) -> Error {
    Error::DatasetFormat {
        path: path.display().to_string(),
        line,
        detail: detail.into(),
    }
}

/// Writes trajectories as a line-delimited dataset file.
///
/// All trajectories must share the config's kind, dt and step count.
pub fn write_dataset(trajectories: &[Trajectory], config: &SamplingConfig, path: &Path) -> Result<()> {
    let header = DatasetHeader {
        format_version: FORMAT_VERSION,
        group: config.kind,
        dt: config.dt,
        steps: config.steps,
        bound_a: config.bound_a,
        noise_sigma: config.noise_sigma,
        seed: config.seed,
        count: trajectories.len(),
    };
    let mut out = BufWriter::new(fs::File::create(path)?);
    let header_json = serde_json::to_string(&header).expect("header serializes");
    writeln!(out, "{header_json}")?;
    for traj in trajectories {
        if traj.kind != config.kind || traj.dt != config.dt || traj.steps() != config.steps {
            return Err(Error::InvalidConfig(format!(
                "trajectory does not match the dataset header \
                 (kind {}, dt {}, steps {})",
                traj.kind,
                traj.dt,
                traj.steps()
            )));
        }
        let increments = to_increments(traj)?;
        let record = TrajectoryRecord {
            true_xi: traj.true_xi.coords().to_vec(),
            poses: traj
                .poses
                .iter()
                .map(|p| p.matrix().as_slice().to_vec())
                .collect(),
            increments: increments
                .increments
                .iter()
                .map(|inc| inc.coords().to_vec())
                .collect(),
        };
        let record_json = serde_json::to_string(&record).expect("record serializes");
        writeln!(out, "{record_json}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a dataset file, validating the header, per-record shapes and group
/// membership of every pose. Errors carry the offending line number.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let content = fs::read_to_string(path)?;
    let mut lines = content.lines().enumerate();
    let (_, header_line) = lines
        .next()
        .ok_or_else(|| format_err(path, 1, "missing header line"))?;
    let header: DatasetHeader = serde_json::from_str(header_line)
        .map_err(|e| format_err(path, 1, format!("bad header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: header.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let kind = header.group;
    let n = kind.ambient_dim();
    let mut trajectories = Vec::with_capacity(header.count);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: TrajectoryRecord = serde_json::from_str(line)
            .map_err(|e| format_err(path, line_no, format!("bad record: {e}")))?;
        if record.increments.len() != header.steps {
            return Err(format_err(
                path,
                line_no,
                format!(
                    "record has {} increments, header says {}",
                    record.increments.len(),
                    header.steps
                ),
            ));
        }
        if record.poses.len() != header.steps + 1 {
            return Err(format_err(
                path,
                line_no,
                format!(
                    "record has {} poses, expected {}",
                    record.poses.len(),
                    header.steps + 1
                ),
            ));
        }
        let true_xi = AlgebraVector::new(kind, record.true_xi)
            .map_err(|e| format_err(path, line_no, format!("bad generator: {e}")))?;
        let mut poses = Vec::with_capacity(record.poses.len());
        for flat in record.poses {
            let matrix = Matrix::new(n, n, flat)
                .map_err(|e| format_err(path, line_no, format!("bad pose matrix: {e}")))?;
            let pose = GroupElement::new(kind, matrix)
                .map_err(|e| format_err(path, line_no, format!("pose fails validation: {e}")))?;
            poses.push(pose);
        }
        for coords in record.increments {
            AlgebraVector::new(kind, coords)
                .map_err(|e| format_err(path, line_no, format!("bad increment: {e}")))?;
        }
        trajectories.push(Trajectory {
            kind,
            dt: header.dt,
            poses,
            true_xi,
            noise_sigma: header.noise_sigma,
        });
    }
    if trajectories.len() != header.count {
        return Err(format_err(
            path,
            1,
            format!(
                "header says {} records, file has {}",
                header.count,
                trajectories.len()
            ),
        ));
    }
    Ok(Dataset {
        header,
        trajectories,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    format_version: u32,
    #[serde(flatten)]
    model: EncoderModel,
}

/// Writes an encoder checkpoint as a single JSON line.
pub fn write_model(model: &EncoderModel, path: &Path) -> Result<()> {
    model.validate()?;
    let checkpoint = Checkpoint {
        format_version: FORMAT_VERSION,
        model: model.clone(),
    };
    let json = serde_json::to_string(&checkpoint).expect("checkpoint serializes");
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{json}")?;
    out.flush()?;
    Ok(())
}

/// Reads an encoder checkpoint, re-validating shape consistency.
pub fn read_model(path: &Path) -> Result<EncoderModel> {
    let content = fs::read_to_string(path)?;
    let checkpoint: Checkpoint = serde_json::from_str(content.trim_end()).map_err(|e| {
        format_err(path, 1, format!("bad checkpoint: {e}"))
    })?;
    if checkpoint.format_version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: checkpoint.format_version,
            expected: FORMAT_VERSION,
        });
    }
    checkpoint.model.validate()?;
    Ok(checkpoint.model)
}
