use std::fs;

use lierec_core::baseline::{compare, estimate_mean_increment, summarize};
use lierec_core::encoder::{train_pipeline, EncoderModel, TrainConfig};
use lierec_core::io::{read_dataset, read_model, write_dataset, write_model, Dataset};
use lierec_core::lie::{GroupKind, Regime};
use lierec_core::matrix::Matrix;
use lierec_core::synth::{generate_clean, generate_dataset, SamplingConfig, Trajectory};

use crate::report;
use crate::svg::{Chart, Series, PALETTE};
use crate::{CliError, EvalArgs, GenArgs, PlotArgs, PlotKind, TrainArgs};

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let config = SamplingConfig {
        kind: args.group,
        bound_a: args.bound,
        dt: args.dt,
        steps: args.steps,
        noise_sigma: args.sigma,
        seed: args.seed,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.n == 0 {
        eprintln!("warning: generating an empty dataset");
    }
    let trajectories = generate_dataset(&config, args.n)?;
    write_dataset(&trajectories, &config, &args.out)?;
    println!(
        "wrote {} {} trajectories to {} (steps={} dt={} bound={} sigma={} seed={})",
        args.n,
        args.group,
        args.out.display(),
        args.steps,
        args.dt,
        args.bound,
        args.sigma,
        args.seed
    );
    Ok(())
}

pub fn train(args: &TrainArgs) -> Result<(), CliError> {
    if !(args.lr > 0.0) || !args.lr.is_finite() {
        return Err(CliError::Usage(format!(
            "--lr must be positive, got {}",
            args.lr
        )));
    }
    if args.batch == 0 {
        return Err(CliError::Usage("--batch must be at least 1".into()));
    }
    let dataset = read_dataset(&args.data)?;
    if dataset.trajectories.is_empty() {
        return Err(CliError::Data(format!(
            "{} contains no trajectories",
            args.data.display()
        )));
    }
    if args.epochs == 0 {
        eprintln!("warning: --epochs 0 writes the freshly initialized model");
    }
    let config = TrainConfig {
        learning_rate: args.lr,
        batch_size: args.batch,
        epochs: args.epochs,
        optimizer: args.optimizer,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let (model, train_report) = train_pipeline(&dataset.trajectories, args.hidden, &config)?;
    write_model(&model, &args.out)?;
    let loss_path = args.out.with_extension("loss.csv");
    report::write_loss_csv(&loss_path, &train_report.epochs)?;

    match train_report.epochs.last() {
        Some(last) => println!(
            "trained {} epochs on {} {} trajectories: train_loss={:.6e} val_loss={:.6e}; \
             validation mean |error| per component [{}]",
            args.epochs,
            dataset.trajectories.len(),
            model.kind,
            last.train_loss,
            last.val_loss,
            fmt_components(&train_report.val_component_error),
        ),
        None => println!(
            "wrote initialized {} model (0 epochs, {} trajectories)",
            model.kind,
            dataset.trajectories.len()
        ),
    }
    println!(
        "checkpoint: {}; loss curve: {}",
        args.out.display(),
        loss_path.display()
    );
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let model = read_model(&args.model)?;
    let dataset = read_dataset(&args.data)?;
    check_kinds(&model, &dataset)?;
    let is_sl2r = model.kind == GroupKind::Sl2r;

    let mut rows = Vec::with_capacity(dataset.trajectories.len());
    let mut regimes: Vec<(Regime, Regime)> = Vec::new();
    for traj in &dataset.trajectories {
        let mlp = model.predict_generator(traj)?;
        let baseline = estimate_mean_increment(traj)?;
        if is_sl2r {
            regimes.push((traj.true_xi.regime()?, mlp.regime()?));
        }
        rows.push(compare(&mlp, &baseline, &traj.true_xi)?);
    }

    if rows.is_empty() {
        report::write_eval_csv(&args.out, &rows, None, None)?;
        eprintln!("warning: empty dataset; wrote a header-only report");
        return Ok(());
    }
    let summary = summarize(&rows)?;
    let regimes_opt = is_sl2r.then_some(&regimes[..]);
    report::write_eval_csv(&args.out, &rows, regimes_opt, Some(&summary))?;

    let mut line = format!(
        "evaluated {} {} trajectories: mlp mean |error| per component [{}] (max [{}]); \
         baseline mean |error| per component [{}]",
        rows.len(),
        model.kind,
        fmt_components(&summary.model_mean),
        fmt_components(&summary.model_max),
        fmt_components(&summary.baseline_mean),
    );
    if is_sl2r {
        let matched = regimes.iter().filter(|(t, p)| t == p).count();
        line.push_str(&format!(
            "; regime match rate {:.1}% ({matched}/{})",
            100.0 * matched as f64 / regimes.len() as f64,
            regimes.len()
        ));
    }
    println!("{line}");
    println!("report: {}", args.out.display());
    Ok(())
}

pub fn plot(args: &PlotArgs) -> Result<(), CliError> {
    match args.kind {
        PlotKind::Loss => plot_loss(args),
        PlotKind::Traj => plot_traj(args),
        PlotKind::Generator => plot_generator(args),
    }
}

fn plot_loss(args: &PlotArgs) -> Result<(), CliError> {
    let report_path = args
        .report
        .as_ref()
        .ok_or_else(|| CliError::Usage("--kind loss requires --report".into()))?;
    let epochs = report::read_loss_csv(report_path)?;
    let mut chart = Chart::new("Training and validation loss", "epoch", "mean squared error");
    chart.series.push(Series::line(
        "train",
        PALETTE[0],
        epochs.iter().map(|e| (e.epoch as f64, e.train_loss)).collect(),
    ));
    chart.series.push(Series::dashed_line(
        "validation",
        PALETTE[1],
        epochs.iter().map(|e| (e.epoch as f64, e.val_loss)).collect(),
    ));
    fs::write(&args.out, chart.render()).map_err(CliError::from_io)?;
    report::write_loss_csv(&args.out.with_extension("csv"), &epochs)?;
    println!(
        "wrote {} and {} ({} epochs)",
        args.out.display(),
        args.out.with_extension("csv").display(),
        epochs.len()
    );
    Ok(())
}

fn plot_traj(args: &PlotArgs) -> Result<(), CliError> {
    let (model, dataset) = load_model_and_data(args, "traj")?;
    let traj = dataset.trajectories.get(args.index).ok_or_else(|| {
        CliError::Data(format!(
            "--index {} is out of range ({} trajectories)",
            args.index,
            dataset.trajectories.len()
        ))
    })?;
    let predicted_xi = model.predict_generator(traj)?;
    let config = SamplingConfig {
        kind: traj.kind,
        bound_a: dataset.header.bound_a,
        dt: traj.dt,
        steps: traj.steps(),
        noise_sigma: 0.0,
        seed: 0,
    };
    let predicted = generate_clean(&predicted_xi, &config)?;

    let csv_path = args.out.with_extension("csv");
    match traj.kind {
        GroupKind::Se2 => {
            let path = |t: &Trajectory| -> Vec<(f64, f64)> {
                t.poses
                    .iter()
                    .map(|p| (p.matrix().get(0, 2), p.matrix().get(1, 2)))
                    .collect()
            };
            let true_path = path(traj);
            let pred_path = path(&predicted);
            let deviation = true_path
                .iter()
                .zip(&pred_path)
                .map(|(a, b)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                .fold(0.0f64, f64::max);
            let mut chart = Chart::new(
                format!("Planar trajectory overlay (index {})", args.index),
                "x",
                "y",
            );
            chart.series.push(Series::line("true path", PALETTE[0], true_path.clone()));
            chart
                .series
                .push(Series::dashed_line("predicted path", PALETTE[1], pred_path.clone()));
            fs::write(&args.out, chart.render()).map_err(CliError::from_io)?;
            let rows: Vec<Vec<String>> = true_path
                .iter()
                .zip(&pred_path)
                .enumerate()
                .map(|(t, (a, b))| {
                    vec![
                        t.to_string(),
                        a.0.to_string(),
                        a.1.to_string(),
                        b.0.to_string(),
                        b.1.to_string(),
                    ]
                })
                .collect();
            report::write_csv(
                &csv_path,
                &["step", "true_x", "true_y", "pred_x", "pred_y"],
                &rows,
            )?;
            println!("max positional deviation: {deviation:.6}");
        }
        GroupKind::So3 | GroupKind::Se3 => {
            // trace of the rotated z-axis direction over time
            let z_axis = |t: &Trajectory| -> Vec<[f64; 3]> {
                t.poses
                    .iter()
                    .map(|p| {
                        let m = p.matrix();
                        [m.get(0, 2), m.get(1, 2), m.get(2, 2)]
                    })
                    .collect()
            };
            let true_z = z_axis(traj);
            let pred_z = z_axis(&predicted);
            let max_angle = traj
                .poses
                .iter()
                .zip(&predicted.poses)
                .map(|(a, b)| rotation_angle_between(a.matrix(), b.matrix()))
                .fold(0.0f64, f64::max);
            let mut chart = Chart::new(
                format!("Rotated z-axis direction overlay (index {})", args.index),
                "step",
                "component value",
            );
            let axes = ["z_x", "z_y", "z_z"];
            for (j, axis) in axes.iter().enumerate() {
                chart.series.push(Series::line(
                    format!("true {axis}"),
                    PALETTE[j],
                    true_z.iter().enumerate().map(|(t, v)| (t as f64, v[j])).collect(),
                ));
                chart.series.push(Series::dashed_line(
                    format!("pred {axis}"),
                    PALETTE[j + 3],
                    pred_z.iter().enumerate().map(|(t, v)| (t as f64, v[j])).collect(),
                ));
            }
            fs::write(&args.out, chart.render()).map_err(CliError::from_io)?;
            let rows: Vec<Vec<String>> = true_z
                .iter()
                .zip(&pred_z)
                .zip(traj.poses.iter().zip(&predicted.poses))
                .enumerate()
                .map(|(t, ((tz, pz), (tp, pp)))| {
                    let mut row = vec![t.to_string()];
                    row.extend(tz.iter().map(|v| v.to_string()));
                    row.extend(pz.iter().map(|v| v.to_string()));
                    row.push(rotation_angle_between(tp.matrix(), pp.matrix()).to_string());
                    row
                })
                .collect();
            report::write_csv(
                &csv_path,
                &[
                    "step", "true_zx", "true_zy", "true_zz", "pred_zx", "pred_zy", "pred_zz",
                    "angle_dev_rad",
                ],
                &rows,
            )?;
            println!("max angular deviation: {max_angle:.6} rad");
        }
        GroupKind::Sl2r => {
            let entries = |t: &Trajectory| -> Vec<[f64; 4]> {
                t.poses
                    .iter()
                    .map(|p| {
                        let m = p.matrix();
                        [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)]
                    })
                    .collect()
            };
            let true_e = entries(traj);
            let pred_e = entries(&predicted);
            let deviation = true_e
                .iter()
                .zip(&pred_e)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0f64, f64::max);
            let mut chart = Chart::new(
                format!("Matrix entry flow overlay (index {})", args.index),
                "step",
                "entry value",
            );
            let names = ["m00", "m01", "m10", "m11"];
            for (j, name) in names.iter().enumerate() {
                chart.series.push(Series::line(
                    format!("true {name}"),
                    PALETTE[j],
                    true_e.iter().enumerate().map(|(t, v)| (t as f64, v[j])).collect(),
                ));
                chart.series.push(Series::dashed_line(
                    format!("pred {name}"),
                    PALETTE[j + 4],
                    pred_e.iter().enumerate().map(|(t, v)| (t as f64, v[j])).collect(),
                ));
            }
            fs::write(&args.out, chart.render()).map_err(CliError::from_io)?;
            let rows: Vec<Vec<String>> = true_e
                .iter()
                .zip(&pred_e)
                .enumerate()
                .map(|(t, (a, b))| {
                    let mut row = vec![t.to_string()];
                    row.extend(a.iter().map(|v| v.to_string()));
                    row.extend(b.iter().map(|v| v.to_string()));
                    row
                })
                .collect();
            report::write_csv(
                &csv_path,
                &[
                    "step", "true_m00", "true_m01", "true_m10", "true_m11", "pred_m00",
                    "pred_m01", "pred_m10", "pred_m11",
                ],
                &rows,
            )?;
            println!("max entry deviation: {deviation:.6}");
        }
    }
    println!(
        "wrote {} and {}",
        args.out.display(),
        csv_path.display()
    );
    Ok(())
}

fn plot_generator(args: &PlotArgs) -> Result<(), CliError> {
    let (model, dataset) = load_model_and_data(args, "generator")?;
    if dataset.trajectories.is_empty() {
        return Err(CliError::Data("dataset has no trajectories to plot".into()));
    }
    let dim = model.kind.algebra_dim();
    let mut per_component: Vec<Vec<(f64, f64)>> = vec![Vec::new(); dim];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, traj) in dataset.trajectories.iter().enumerate() {
        let pred = model.predict_generator(traj)?;
        for j in 0..dim {
            let truth = traj.true_xi.coords()[j];
            let predicted = pred.coords()[j];
            per_component[j].push((truth, predicted));
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                truth.to_string(),
                predicted.to_string(),
            ]);
        }
    }
    let mut chart = Chart::new(
        format!("Estimated vs true generator coordinates ({})", model.kind),
        "true coordinate",
        "predicted coordinate",
    );
    chart.diagonal = true;
    for (j, points) in per_component.into_iter().enumerate() {
        chart.series.push(Series::scatter(
            format!("component {j}"),
            PALETTE[j % PALETTE.len()],
            points,
        ));
    }
    fs::write(&args.out, chart.render()).map_err(CliError::from_io)?;
    let csv_path = args.out.with_extension("csv");
    report::write_csv(&csv_path, &["traj", "component", "true", "predicted"], &rows)?;
    println!(
        "wrote {} and {} ({} trajectories)",
        args.out.display(),
        csv_path.display(),
        dataset.trajectories.len()
    );
    Ok(())
}

fn load_model_and_data(args: &PlotArgs, kind: &str) -> Result<(EncoderModel, Dataset), CliError> {
    let model_path = args
        .model
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("--kind {kind} requires --model")))?;
    let data_path = args
        .data
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("--kind {kind} requires --data")))?;
    let model = read_model(model_path)?;
    let dataset = read_dataset(data_path)?;
    check_kinds(&model, &dataset)?;
    Ok((model, dataset))
}

fn check_kinds(model: &EncoderModel, dataset: &Dataset) -> Result<(), CliError> {
    if model.kind != dataset.header.group {
        return Err(CliError::Data(format!(
            "model was trained on {}, dataset holds {} trajectories",
            model.kind, dataset.header.group
        )));
    }
    let expected = dataset.header.steps * model.kind.algebra_dim();
    if model.input_dim != expected {
        return Err(CliError::Data(format!(
            "model expects {} features but the dataset's {} steps produce {}",
            model.input_dim, dataset.header.steps, expected
        )));
    }
    Ok(())
}

/// Relative rotation angle between the 3x3 rotation blocks of two poses.
fn rotation_angle_between(a: &Matrix, b: &Matrix) -> f64 {
    let mut trace = 0.0;
    for i in 0..3 {
        for k in 0..3 {
            trace += a.get(k, i) * b.get(k, i);
        }
    }
    ((trace - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

fn fmt_components(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.5}"))
        .collect::<Vec<_>>()
        .join(", ")
}
