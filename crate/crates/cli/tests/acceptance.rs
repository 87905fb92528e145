//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test -p lierec-cli --test acceptance -- --nocapture` to
//! see them). Criteria 1-7 drive the library directly; 8 and 9 exercise the
//! installed binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use lierec_core::encoder::{backward, EncoderModel, TrainConfig, DEFAULT_HIDDEN};
use lierec_core::encoder::train_pipeline;
use lierec_core::lie::{AlgebraVector, GroupKind};
use lierec_core::preprocess::{fit_stats, normalize, to_increments, FeatureVector, NormalizationStats};
use lierec_core::rng::{substream, SplitMix64};
use lierec_core::synth::{generate_dataset, SamplingConfig, Trajectory};

const BIN: &str = env!("CARGO_BIN_EXE_lierec");

fn report(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance criterion {criterion}: {status} — {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn random_unit_ball_vector(kind: GroupKind, rng: &mut SplitMix64) -> AlgebraVector {
    let dim = kind.algebra_dim();
    let coords: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let v = AlgebraVector::new(kind, coords).unwrap();
    let norm = v.norm();
    if norm > 1.0 {
        v.scaled(rng.uniform(0.0, 1.0) / norm)
    } else {
        v
    }
}

/// 1. Closed-form exp/log: round trips and series agreement on all groups.
#[test]
fn criterion_1_exp_log_correctness() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE01);
    let mut max_roundtrip = 0.0f64;
    let mut max_series_dev = 0.0f64;
    for kind in GroupKind::ALL {
        for _ in 0..1000 {
            let v = random_unit_ball_vector(kind, &mut rng);
            let g = v.exp();
            let back = g.log().unwrap();
            let err = v
                .coords()
                .iter()
                .zip(back.coords())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            max_roundtrip = max_roundtrip.max(err);
            let series = v.hat().exp_series(30).unwrap();
            let dev = g.matrix().sub(&series).unwrap().frobenius_norm();
            max_series_dev = max_series_dev.max(dev);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_roundtrip < 1e-9 && max_series_dev < 1e-9 && elapsed < 5.0;
    report(
        "1 (exp/log correctness)",
        pass,
        &format!(
            "max round-trip error {max_roundtrip:.3e}, max series deviation \
             {max_series_dev:.3e}, {elapsed:.2} s (< 5 s)"
        ),
    );
}

/// 2. The closed-form baseline recovers the generator exactly on clean data.
#[test]
fn criterion_2_clean_data_oracle() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for kind in GroupKind::ALL {
        let config = SamplingConfig::defaults(kind, 0xACCE02);
        let trajectories = generate_dataset(&config, 1000).unwrap();
        for traj in &trajectories {
            let estimate = lierec_core::baseline::estimate_mean_increment(traj).unwrap();
            for (e, t) in estimate.coords().iter().zip(traj.true_xi.coords()) {
                worst = worst.max((e - t).abs());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-8 && elapsed < 10.0;
    report(
        "2 (clean-data oracle)",
        pass,
        &format!(
            "worst per-component error {worst:.3e} over 4x1000 trajectories, \
             {elapsed:.2} s (< 10 s)"
        ),
    );
}

fn mean_component_error(model: &EncoderModel, test_set: &[Trajectory]) -> Vec<f64> {
    let dim = model.output_dim;
    let mut err = vec![0.0; dim];
    for traj in test_set {
        let pred = model.predict_generator(traj).unwrap();
        for j in 0..dim {
            err[j] += (pred.coords()[j] - traj.true_xi.coords()[j]).abs();
        }
    }
    for e in err.iter_mut() {
        *e /= test_set.len() as f64;
    }
    err
}

/// Trains with the default recipe and falls back to the wider/longer one if
/// the target is missed; returns (per-component error, recipe description).
fn headline_run(kind: GroupKind, sigma: f64, threshold: f64) -> (Vec<f64>, String, f64, Vec<Trajectory>, EncoderModel) {
    let start = Instant::now();
    let train_config = SamplingConfig {
        noise_sigma: sigma,
        ..SamplingConfig::defaults(kind, 0x7EA1)
    };
    let test_config = SamplingConfig {
        seed: 0x7E57,
        ..train_config.clone()
    };
    let train_set = generate_dataset(&train_config, 5000).unwrap();
    let test_set = generate_dataset(&test_config, 500).unwrap();

    let attempt = |hidden: [usize; 2], epochs: usize| -> (Vec<f64>, EncoderModel) {
        let tc = TrainConfig {
            epochs,
            seed: 11,
            ..TrainConfig::default()
        };
        let (model, _) = train_pipeline(&train_set, hidden, &tc).unwrap();
        (mean_component_error(&model, &test_set), model)
    };

    let (errors, model) = attempt(DEFAULT_HIDDEN, 50);
    let worst = errors.iter().cloned().fold(0.0f64, f64::max);
    if worst < threshold {
        let elapsed = start.elapsed().as_secs_f64();
        return (errors, "64,64 / 50 epochs".into(), elapsed, test_set, model);
    }
    // the criterion permits widening before declaring failure
    let (errors, model) = attempt([128, 128], 100);
    let elapsed = start.elapsed().as_secs_f64();
    (errors, "128,128 / 100 epochs (widened)".into(), elapsed, test_set, model)
}

fn headline_criterion(tag: &str, kind: GroupKind) {
    let (errors, recipe, elapsed, _, _) = headline_run(kind, 0.0, 0.03);
    let worst = errors.iter().cloned().fold(0.0f64, f64::max);
    let pass = worst < 0.03 && elapsed < 600.0;
    report(
        tag,
        pass,
        &format!(
            "{kind}: mean |error| per component {:?} (worst {worst:.4}, target < 0.03), \
             recipe {recipe}, {elapsed:.1} s (< 600 s)",
            errors.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>(),
        ),
    );
}

/// 3. Headline accuracy on clean data for the three rigid-motion groups.
#[test]
fn criterion_3_headline_se2() {
    headline_criterion("3 (headline error, se2)", GroupKind::Se2);
}

#[test]
fn criterion_3_headline_se3() {
    headline_criterion("3 (headline error, se3)", GroupKind::Se3);
}

#[test]
fn criterion_3_headline_so3() {
    headline_criterion("3 (headline error, so3)", GroupKind::So3);
}

/// 4. Mild Gaussian noise keeps SE(3) errors below the relaxed bound.
#[test]
fn criterion_4_noise_robustness() {
    let (errors, recipe, elapsed, _, _) = headline_run(GroupKind::Se3, 0.01, 0.05);
    let worst = errors.iter().cloned().fold(0.0f64, f64::max);
    let pass = worst < 0.05;
    report(
        "4 (noise robustness, se3 sigma=0.01)",
        pass,
        &format!(
            "mean |error| per component {:?} (worst {worst:.4}, target < 0.05), \
             recipe {recipe}, {elapsed:.1} s",
            errors.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>(),
        ),
    );
}

/// 5. Predicted sl2r generators land in the true dynamical regime away from
/// the parabolic boundary.
#[test]
fn criterion_5_sl2r_regime_recovery() {
    let (_, recipe, elapsed, test_set, model) = headline_run(GroupKind::Sl2r, 0.0, 0.03);
    let mut considered = 0usize;
    let mut matched = 0usize;
    for traj in &test_set {
        if traj.true_xi.algebra_det().abs() < 0.1 {
            continue; // near-parabolic boundary excluded
        }
        considered += 1;
        let pred = model.predict_generator(traj).unwrap();
        if pred.regime().unwrap() == traj.true_xi.regime().unwrap() {
            matched += 1;
        }
    }
    let rate = matched as f64 / considered as f64;
    let pass = rate >= 0.95 && considered > 100;
    report(
        "5 (sl2r regime recovery)",
        pass,
        &format!(
            "regime match {matched}/{considered} = {:.1}% (target >= 95%), recipe {recipe}, \
             {elapsed:.1} s",
            rate * 100.0
        ),
    );
}

/// 6. Analytic gradients against central finite differences.
#[test]
fn criterion_6_gradient_integrity() {
    let mut rng = SplitMix64::new(0xACCE06);
    let mut worst = 0.0f64;
    for pair in 0..100 {
        let kind = GroupKind::Se2;
        let blocks = 2 + (pair % 6); // input_dim = 6..21
        let input_dim = kind.algebra_dim() * blocks;
        let h1 = 4 + (pair % 12);
        let h2 = 4 + (pair % 7);
        let stats = NormalizationStats {
            mean: vec![0.0; 3],
            sigma: 1.0,
            count: 2,
        };
        let model = EncoderModel::init(
            kind,
            input_dim,
            [h1, h2],
            stats,
            &mut substream(0xACCE06, pair as u64),
        )
        .unwrap();
        let x = FeatureVector::new((0..input_dim).map(|_| rng.uniform(-2.0, 2.0)).collect()).unwrap();
        let target = AlgebraVector::new(kind, (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap();
        let grads = backward(&model, &x, &target).unwrap();

        let loss_of = |m: &EncoderModel| -> f64 {
            let pred = m.forward(&x).unwrap();
            pred.coords()
                .iter()
                .zip(target.coords())
                .map(|(p, t)| (p - t) * (p - t))
                .sum()
        };
        let h = 1e-5;
        let mut check = |analytic: &[f64], pick: &dyn Fn(&mut EncoderModel) -> &mut Vec<f64>| {
            for i in 0..analytic.len() {
                let mut plus = model.clone();
                pick(&mut plus)[i] += h;
                let mut minus = model.clone();
                pick(&mut minus)[i] -= h;
                let numeric = (loss_of(&plus) - loss_of(&minus)) / (2.0 * h);
                let rel = (analytic[i] - numeric).abs()
                    / 1.0f64.max(analytic[i].abs()).max(numeric.abs());
                worst = worst.max(rel);
            }
        };
        check(&grads.w1, &|m| &mut m.w1);
        check(&grads.b1, &|m| &mut m.b1);
        check(&grads.w2, &|m| &mut m.w2);
        check(&grads.b2, &|m| &mut m.b2);
        check(&grads.w3, &|m| &mut m.w3);
        check(&grads.b3, &|m| &mut m.b3);
    }
    let pass = worst < 1e-5;
    report(
        "6 (gradient integrity)",
        pass,
        &format!("max relative error {worst:.3e} over 100 (model, sample) pairs (target < 1e-5)"),
    );
}

/// 7. Pooled normalized increments are exactly centered and unit-scaled.
#[test]
fn criterion_7_normalization_identity() {
    let config = SamplingConfig::defaults(GroupKind::Se3, 0xACCE07);
    let trajectories = generate_dataset(&config, 500).unwrap();
    let sequences: Vec<_> = trajectories.iter().map(|t| to_increments(t).unwrap()).collect();
    let stats = fit_stats(&sequences).unwrap();
    let dim = GroupKind::Se3.algebra_dim();
    let mut mean = vec![0.0; dim];
    let mut sq_sum = 0.0;
    let mut count = 0usize;
    for seq in &sequences {
        let features = normalize(seq, &stats).unwrap();
        for chunk in features.values().chunks(dim) {
            for (m, v) in mean.iter_mut().zip(chunk) {
                *m += v;
            }
            sq_sum += chunk.iter().map(|v| v * v).sum::<f64>();
            count += 1;
        }
    }
    let mean_norm = mean
        .iter()
        .map(|m| (m / count as f64) * (m / count as f64))
        .sum::<f64>()
        .sqrt();
    let rms = (sq_sum / count as f64).sqrt();
    let pass = mean_norm < 1e-10 && (rms - 1.0).abs() < 1e-10;
    report(
        "7 (normalization identity)",
        pass,
        &format!(
            "pooled normalized mean norm {mean_norm:.3e} (< 1e-10), rms {rms:.12} \
             (within 1e-10 of 1) over {count} increments"
        ),
    );
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(name: &str) -> Self {
        let path = std::env::temp_dir().join(format!(
            "lierec_acceptance_{}_{name}",
            std::process::id()
        ));
        fs::create_dir_all(&path).unwrap();
        TempDir(path)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .env_remove("LIEREC_SEED")
        .output()
        .expect("binary runs")
}

fn run_cli_ok(args: &[&str]) {
    let out = run_cli(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// One gen -> train -> eval pipeline run with fixed flags into `dir`.
fn pipeline_run(dir: &Path) {
    let data = dir.join("data.ljd").display().to_string();
    let model = dir.join("model.lem").display().to_string();
    let report_csv = dir.join("report.csv").display().to_string();
    run_cli_ok(&[
        "gen", "--group", "se2", "--n", "200", "--steps", "20", "--dt", "0.1", "--bound", "1.0",
        "--sigma", "0.0", "--seed", "99", "--out", &data,
    ]);
    run_cli_ok(&[
        "train", "--data", &data, "--out", &model, "--hidden", "32,32", "--epochs", "5",
        "--batch", "32", "--seed", "7", "--optimizer", "adam",
    ]);
    run_cli_ok(&["eval", "--model", &model, "--data", &data, "--out", &report_csv]);
}

/// 8. Re-running the pipeline with identical flags reproduces every output
/// file byte for byte.
#[test]
fn criterion_8_reproducibility() {
    let dir_a = TempDir::new("repro_a");
    let dir_b = TempDir::new("repro_b");
    pipeline_run(dir_a.path());
    pipeline_run(dir_b.path());
    let mut identical = true;
    let mut detail = String::new();
    for name in ["data.ljd", "model.lem", "model.loss.csv", "report.csv"] {
        let a = fs::read(dir_a.path().join(name)).unwrap();
        let b = fs::read(dir_b.path().join(name)).unwrap();
        let same = a == b;
        identical &= same;
        detail.push_str(&format!("{name}: {} bytes{}; ", a.len(), if same { "" } else { " DIFFER" }));
    }
    report("8 (reproducibility)", identical, detail.trim_end_matches("; "));
}

/// 9. All three plot kinds emit well-formed SVG with backing CSV.
#[test]
fn criterion_9_plot_artifacts() {
    let dir = TempDir::new("plots");
    pipeline_run(dir.path());
    let model = dir.path().join("model.lem").display().to_string();
    let data = dir.path().join("data.ljd").display().to_string();
    let loss_csv = dir.path().join("model.loss.csv").display().to_string();

    let loss_svg = dir.path().join("loss.svg");
    let traj_svg = dir.path().join("traj.svg");
    let gen_svg = dir.path().join("generator.svg");
    run_cli_ok(&[
        "plot", "--kind", "loss", "--report", &loss_csv,
        "--out", &loss_svg.display().to_string(),
    ]);
    run_cli_ok(&[
        "plot", "--kind", "traj", "--model", &model, "--data", &data,
        "--out", &traj_svg.display().to_string(),
    ]);
    run_cli_ok(&[
        "plot", "--kind", "generator", "--model", &model, "--data", &data,
        "--out", &gen_svg.display().to_string(),
    ]);

    let mut pass = true;
    let mut detail = String::new();
    let checks = [
        (&loss_svg, 2usize), // train + validation polylines
        (&traj_svg, 2),      // true + predicted se2 paths
        (&gen_svg, 0),       // scatter: circles, not polylines
    ];
    for (path, min_polylines) in checks {
        let svg = fs::read_to_string(path).unwrap();
        let well_formed = svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>");
        let polylines = svg.matches("<polyline").count();
        let circles = svg.matches("<circle").count();
        let enough = if min_polylines > 0 {
            polylines >= min_polylines
        } else {
            circles >= 10
        };
        pass &= well_formed && enough;
        detail.push_str(&format!(
            "{}: {} polylines, {} circles{}; ",
            path.file_name().unwrap().to_string_lossy(),
            polylines,
            circles,
            if well_formed { "" } else { " MALFORMED" }
        ));

        let csv = fs::read_to_string(path.with_extension("csv")).unwrap();
        let mut lines = csv.lines();
        let has_header = lines.next().is_some_and(|h| h.contains(','));
        let has_rows = lines.next().is_some();
        pass &= has_header && has_rows;
    }
    report("9 (plot artifact smoke)", pass, detail.trim_end_matches("; "));
}
