//! CSV emission and parsing for evaluation reports and loss curves.
//!
//! Floats are written with Rust's shortest round-trip formatting, so report
//! files are byte-stable across runs with the same inputs.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use lierec_core::baseline::{ErrorRow, ErrorSummary};
use lierec_core::encoder::EpochLoss;
use lierec_core::lie::Regime;

use crate::CliError;

pub fn write_loss_csv(path: &Path, epochs: &[EpochLoss]) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(CliError::from_io)?);
    let write = |out: &mut BufWriter<fs::File>, line: String| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(CliError::from_io)
    };
    write(&mut out, "epoch,train_loss,val_loss".to_string())?;
    for e in epochs {
        write(&mut out, format!("{},{},{}", e.epoch, e.train_loss, e.val_loss))?;
    }
    out.flush().map_err(CliError::from_io)
}

pub fn read_loss_csv(path: &Path) -> Result<Vec<EpochLoss>, CliError> {
    let content = fs::read_to_string(path).map_err(CliError::from_io)?;
    let mut lines = content.lines();
    match lines.next() {
        Some(header) if header.trim() == "epoch,train_loss,val_loss" => {}
        other => {
            return Err(CliError::Data(format!(
                "{}: expected loss curve header 'epoch,train_loss,val_loss', got {:?}",
                path.display(),
                other.unwrap_or_default()
            )))
        }
    }
    let mut epochs = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Data(format!(
                "{}:{}: expected 3 fields, got {}",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim().parse().map_err(|_| {
                CliError::Data(format!("{}:{}: bad number '{s}'", path.display(), i + 2))
            })
        };
        epochs.push(EpochLoss {
            epoch: fields[0].trim().parse().map_err(|_| {
                CliError::Data(format!("{}:{}: bad epoch '{}'", path.display(), i + 2, fields[0]))
            })?,
            train_loss: parse(fields[1])?,
            val_loss: parse(fields[2])?,
        });
    }
    Ok(epochs)
}

/// Per-trajectory evaluation rows plus mean/max summary rows. For sl2r the
/// regime columns (true, predicted, match) are appended.
pub fn write_eval_csv(
    path: &Path,
    rows: &[ErrorRow],
    regimes: Option<&[(Regime, Regime)]>,
    summary: Option<&ErrorSummary>,
) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(CliError::from_io)?);
    let dim = rows.first().map_or(0, |r| r.truth.coords().len());

    let mut header: Vec<String> = vec!["traj".into()];
    for prefix in ["truth", "mlp", "baseline", "abs_err_mlp", "abs_err_baseline"] {
        for j in 0..dim {
            header.push(format!("{prefix}_{j}"));
        }
    }
    header.push("euclid_err_mlp".into());
    header.push("euclid_err_baseline".into());
    if regimes.is_some() {
        header.extend(["regime_true".into(), "regime_pred".into(), "regime_match".into()]);
    }
    writeln!(out, "{}", header.join(",")).map_err(CliError::from_io)?;

    for (i, row) in rows.iter().enumerate() {
        let mut fields: Vec<String> = vec![i.to_string()];
        for values in [
            row.truth.coords(),
            row.model_pred.coords(),
            row.baseline_pred.coords(),
            &row.model_abs_err[..],
            &row.baseline_abs_err[..],
        ] {
            fields.extend(values.iter().map(|v| v.to_string()));
        }
        fields.push(row.model_euclid_err.to_string());
        fields.push(row.baseline_euclid_err.to_string());
        if let Some(regimes) = regimes {
            let (t, p) = regimes[i];
            fields.push(t.to_string());
            fields.push(p.to_string());
            fields.push((t == p).to_string());
        }
        writeln!(out, "{}", fields.join(",")).map_err(CliError::from_io)?;
    }

    if let Some(summary) = summary {
        let blank = vec![String::new(); 3 * dim];
        for (tag, mlp, base, euclid_mlp, euclid_base) in [
            (
                "mean",
                &summary.model_mean,
                &summary.baseline_mean,
                summary.model_mean_euclid,
                summary.baseline_mean_euclid,
            ),
            (
                "max",
                &summary.model_max,
                &summary.baseline_max,
                f64::NAN,
                f64::NAN,
            ),
        ] {
            let mut fields: Vec<String> = vec![tag.to_string()];
            fields.extend(blank.iter().cloned());
            fields.extend(mlp.iter().map(|v| v.to_string()));
            fields.extend(base.iter().map(|v| v.to_string()));
            if euclid_mlp.is_finite() {
                fields.push(euclid_mlp.to_string());
                fields.push(euclid_base.to_string());
            } else {
                fields.push(String::new());
                fields.push(String::new());
            }
            if let Some(regimes) = regimes {
                if tag == "mean" && !regimes.is_empty() {
                    let matches = regimes.iter().filter(|(t, p)| t == p).count();
                    fields.extend([
                        String::new(),
                        String::new(),
                        format!("{}", matches as f64 / regimes.len() as f64),
                    ]);
                } else {
                    fields.extend([String::new(), String::new(), String::new()]);
                }
            }
            writeln!(out, "{}", fields.join(",")).map_err(CliError::from_io)?;
        }
    }
    out.flush().map_err(CliError::from_io)
}

/// Writes generic CSV rows (used for plot backing data).
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(CliError::from_io)?);
    writeln!(out, "{}", header.join(",")).map_err(CliError::from_io)?;
    for row in rows {
        writeln!(out, "{}", row.join(",")).map_err(CliError::from_io)?;
    }
    out.flush().map_err(CliError::from_io)
}
