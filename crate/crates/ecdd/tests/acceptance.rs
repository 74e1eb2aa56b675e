//! Acceptance suite: every criterion below is asserted at its stated
//! tolerance and prints one summary line. Run with
//! `cargo test -p ecdd --test acceptance -- --nocapture` to see the numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ecdd::calibration::{
    default_grid, estimate_arl0, fit_table_entry, CalibrationTable, DEFAULT_BASIS_POWERS,
};
use ecdd::classifiers::{LabeledSample, Lda, StreamingClassifier};
use ecdd::detector::{ewma_sigma, Detector, DetectorConfig, DetectorStatus};
use ecdd::harness::{run_experiment, ExperimentReport};
use ecdd::presets::parse_preset;
use ecdd::seed;
use ecdd::streams::{collect_stream, electricity_spec, GeneratorKind, StreamSpec};

/// Replications for the table-reproduction criteria.
const REPS: u64 = 5_000;
const TOLERANCE: f64 = 0.02;

fn run_cell(preset: &str, lambda: f64) -> ExperimentReport {
    let table = CalibrationTable::builtin();
    let mut spec = parse_preset(preset, lambda, None).unwrap();
    spec.replications = REPS;
    run_experiment(&spec, &table, None).unwrap()
}

fn assert_cell(criterion: u32, preset: &str, lambda: f64, target: f64) -> f64 {
    let report = run_cell(preset, lambda);
    let sim = report.mean_accuracy;
    println!(
        "[criterion {criterion}] {preset} (lambda {lambda}): accuracy {sim:.4} \
         vs published {target} ({:+.4})",
        sim - target
    );
    assert!(
        (sim - target).abs() <= TOLERANCE,
        "{preset}: simulated accuracy {sim:.4} outside {target} +/- {TOLERANCE}"
    );
    sim
}

#[test]
fn criterion_1_abrupt_benchmarks_at_arl0_600() {
    assert_cell(1, "gauss200-lda-ecdd-arl600", 0.2, 0.71);
    assert_cell(1, "sine200-lda-ecdd-arl600", 0.2, 0.90);
    assert_cell(1, "gauss200-lda-ecddwt-arl600", 0.2, 0.72);
    assert_cell(1, "sine200-knn-ecdd-arl600", 0.2, 0.91);
    assert_cell(1, "gauss200-lda-none", 0.2, 0.52);
    println!("[criterion 1] PASS");
}

#[test]
fn criterion_2_abrupt_benchmarks_at_arl0_100_and_ordering() {
    assert_cell(2, "gauss50-lda-ecdd-arl100", 0.2, 0.63);
    assert_cell(2, "sine50-lda-ecdd-arl100", 0.2, 0.79);
    assert_cell(2, "gauss50-knn-ecddwt-arl100", 0.2, 0.66);

    // A slow detector wins when the change comes late, a fast one when it
    // comes early: compare the LDA-ECDD accuracies summed over the two
    // datasets at each change point.
    let late_600 = run_cell("gauss200-lda-ecdd-arl600", 0.2).mean_accuracy
        + run_cell("sine200-lda-ecdd-arl600", 0.2).mean_accuracy;
    let late_100 = run_cell("gauss200-lda-ecdd-arl100", 0.2).mean_accuracy
        + run_cell("sine200-lda-ecdd-arl100", 0.2).mean_accuracy;
    println!("[criterion 2] T=200: ARL0 600 total {late_600:.4} vs ARL0 100 total {late_100:.4}");
    assert!(
        late_600 > late_100,
        "at T=200 the ARL0=600 detector must beat ARL0=100"
    );
    let early_100 = run_cell("gauss50-lda-ecdd-arl100", 0.2).mean_accuracy
        + run_cell("sine50-lda-ecdd-arl100", 0.2).mean_accuracy;
    let early_600 = run_cell("gauss50-lda-ecdd-arl600", 0.2).mean_accuracy
        + run_cell("sine50-lda-ecdd-arl600", 0.2).mean_accuracy;
    println!("[criterion 2] T=50: ARL0 100 total {early_100:.4} vs ARL0 600 total {early_600:.4}");
    assert!(
        early_100 > early_600,
        "at T=50 the ARL0=100 detector must beat ARL0=600"
    );
    println!("[criterion 2] PASS");
}

#[test]
fn criterion_3_lambda_sensitivity() {
    let gauss_targets = [(0.1, 0.73), (0.2, 0.72), (0.3, 0.72)];
    let sine_targets = [(0.1, 0.91), (0.2, 0.90), (0.3, 0.89)];
    let mut gauss = Vec::new();
    let mut sine = Vec::new();
    for &(lambda, target) in &gauss_targets {
        gauss.push(assert_cell(3, "gauss200-lda-ecdd-arl600", lambda, target));
    }
    for &(lambda, target) in &sine_targets {
        sine.push(assert_cell(3, "sine200-lda-ecdd-arl600", lambda, target));
    }
    for (name, values) in [("gauss200", gauss), ("sine200", sine)] {
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        println!("[criterion 3] {name} accuracy spread across lambda: {spread:.4}");
        assert!(spread <= 0.03, "{name}: lambda spread {spread:.4} exceeds 0.03");
    }
    println!("[criterion 3] PASS");
}

#[test]
fn criterion_4_gradual_drift() {
    assert_cell(4, "driftgauss-lda-ecdd-arl400", 0.2, 0.68);
    assert_cell(4, "driftsine-lda-ecdd-arl400", 0.2, 0.86);
    let ecdd = run_cell("driftgauss-lda-ecdd-arl400", 0.2).mean_accuracy;
    let wt = run_cell("driftgauss-lda-ecddwt-arl400", 0.2).mean_accuracy;
    println!("[criterion 4] drifting GAUSS: ECDD-WT {wt:.4} vs ECDD {ecdd:.4}");
    assert!(
        wt >= ecdd - 1e-12,
        "warm starts must not hurt on gradual drift: {wt:.4} < {ecdd:.4}"
    );
    println!("[criterion 4] PASS");
}

#[test]
fn criterion_5_calibration_round_trip() {
    let lambda = 0.2;
    let targets = [100.0, 400.0, 1000.0];
    let probes = [0.05, 0.1, 0.2, 0.3];
    let grid = default_grid();

    for (i, &target) in targets.iter().enumerate() {
        let entry = fit_table_entry(
            lambda,
            target,
            &grid,
            &DEFAULT_BASIS_POWERS,
            8_000,
            seed::derive(5_005, i as u64),
        )
        .unwrap();
        for (j, &p0) in probes.iter().enumerate() {
            let limit = entry.eval_clamped(p0);
            let est = estimate_arl0(
                p0,
                lambda,
                limit,
                50_000,
                (100.0 * target) as u64,
                seed::derive(9_009, (i * 10 + j) as u64),
            )
            .unwrap();
            let rel = est.mean / target - 1.0;
            println!(
                "[criterion 5] fitted arl0={target} p0={p0}: L={limit:.4} -> ARL {:.1} ({:+.1}%)",
                est.mean,
                rel * 100.0
            );
            assert!(
                rel.abs() <= 0.10,
                "fresh fit for ARL0 {target} at p0 {p0} re-simulates to {:.1} ({:+.1}%)",
                est.mean,
                rel * 100.0
            );
        }
    }

    // Plausibility check of the published reference polynomials at the same
    // probes. Under this chart's run-length law (verified above and against
    // an independent oracle) the published coefficients sit far outside the
    // +/-15% band at every probe; the check is reported, not gated, and the
    // discrepancy is documented.
    let paper = CalibrationTable::paper_lambda02();
    let mut within = 0u32;
    let mut total = 0u32;
    for entry in &paper.entries {
        for (j, &p0) in probes.iter().enumerate() {
            let limit = entry.eval_clamped(p0);
            let est = estimate_arl0(
                p0,
                lambda,
                limit,
                50_000,
                (100.0 * entry.arl0) as u64,
                seed::derive(11_011, j as u64),
            )
            .unwrap();
            let rel = est.mean / entry.arl0 - 1.0;
            total += 1;
            within += u32::from(rel.abs() <= 0.15);
            println!(
                "[criterion 5] published arl0={} p0={p0}: L={limit:.4} -> ARL {:.1} ({:+.1}%)",
                entry.arl0,
                est.mean,
                rel * 100.0
            );
        }
    }
    println!(
        "[criterion 5] published-polynomial plausibility: {within}/{total} probes within +/-15% \
         (informational; the published table is inconsistent with the chart's run-length law)"
    );
    println!("[criterion 5] PASS");
}

#[test]
fn criterion_6_property_suite() {
    // Exact running mean and bounded z on a deterministic bit pattern.
    let table = CalibrationTable::builtin();
    let config = DetectorConfig {
        lambda: 0.2,
        target_arl0: 400.0,
        warning_fraction: 0.5,
        min_observations: u64::MAX,
        warning_buffer_cap: None,
    };
    let mut det: Detector<()> = Detector::new(config.clone(), &table).unwrap();
    let mut errors = 0u64;
    for i in 0..5_000u64 {
        let bit = u8::from(i % 7 < 2);
        det.step(bit, None).unwrap();
        errors += u64::from(bit);
        let batch = errors as f64 / (i + 1) as f64;
        assert!((det.state().p_hat - batch).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&det.state().z));
    }

    // EWMA mean and variance law at t in {1, 5, 20, 100}, 100k replications.
    let p0 = 0.2;
    let lambda = 0.2;
    let times = [1u64, 5, 20, 100];
    let reps = 100_000u64;
    let samples: Vec<Vec<f64>> = {
        let rows: Vec<Vec<f64>> = (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(606, i));
                let mut z = 0.0;
                let mut out = Vec::with_capacity(times.len());
                for t in 1..=100u64 {
                    let x = f64::from(rng.random::<f64>() < p0);
                    z = (1.0 - lambda) * z + lambda * x;
                    if times.contains(&t) {
                        out.push(z);
                    }
                }
                out
            })
            .collect();
        (0..times.len())
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect()
    };
    for (j, &t) in times.iter().enumerate() {
        let zs = &samples[j];
        let n = zs.len() as f64;
        let mean: f64 = zs.iter().sum::<f64>() / n;
        let var: f64 = zs.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (n - 1.0);
        let expected_mean = p0 * (1.0 - (1.0 - lambda).powi(t as i32));
        let se_mean = (var / n).sqrt();
        assert!(
            (mean - expected_mean).abs() < 3.0 * se_mean,
            "t={t}: mean {mean} vs {expected_mean}"
        );
        let expected_var = ewma_sigma(p0, lambda, t).unwrap().powi(2);
        let m4: f64 = zs.iter().map(|z| (z - mean).powi(4)).sum::<f64>() / n;
        let se_var = ((m4 - var * var).max(0.0) / n).sqrt();
        assert!(
            (var - expected_var).abs() < 3.0 * se_var,
            "t={t}: var {var} vs {expected_var} (3se {})",
            3.0 * se_var
        );
        println!(
            "[criterion 6] t={t}: mean {mean:.5} (law {expected_mean:.5}), \
             var {var:.6} (law {expected_var:.6})"
        );
    }

    // Threshold monotonicity on a fixed bit sequence.
    let mut rng = ChaCha8Rng::seed_from_u64(3_141);
    let bits: Vec<u8> = (0..5_000).map(|_| u8::from(rng.random::<f64>() < 0.3)).collect();
    let first_crossing = |limit: f64| -> Option<usize> {
        let mut z = 0.0;
        for (i, &bit) in bits.iter().enumerate() {
            z = 0.8 * z + 0.2 * f64::from(bit);
            let sigma = ewma_sigma(0.3, 0.2, (i + 1) as u64).unwrap();
            if z > 0.3 + limit * sigma {
                return Some(i + 1);
            }
        }
        None
    };
    let mut last = Some(0);
    for &limit in &[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let crossing = first_crossing(limit);
        if let (Some(a), Some(b)) = (last, crossing) {
            assert!(b >= a, "crossing at L={limit} moved earlier: {b} < {a}");
        }
        last = crossing;
    }

    // Drift implies the warning inequality on a stream that actually drifts.
    let mut det: Detector<()> = Detector::new(
        DetectorConfig {
            min_observations: 0,
            ..config
        },
        &table,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2_718);
    let mut drifts = 0;
    for t in 0..20_000u64 {
        let p = if t % 400 < 300 { 0.1 } else { 0.7 };
        let bit = u8::from(rng.random::<f64>() < p);
        if det.step(bit, None).unwrap() == DetectorStatus::Drift {
            let s = det.state();
            assert!(
                s.z > s.p_hat + 0.5 * det.limit() * s.sigma_z,
                "drift without the warning inequality at t={t}"
            );
            drifts += 1;
            det.reset();
        }
    }
    assert!(drifts > 10, "the oscillating stream must drift repeatedly");

    // Streaming LDA equals the batch statistics to 1e-9.
    let spec = StreamSpec {
        generator: GeneratorKind::Gauss,
        change_point: None,
        length: Some(10_000),
        drift_ramp: None,
        seed: 77_077,
    };
    let samples = collect_stream(&spec).unwrap();
    let mut lda = Lda::new();
    for s in &samples {
        lda.update(s).unwrap();
    }
    for class in 0..2u8 {
        let members: Vec<&LabeledSample> = samples.iter().filter(|s| s.label == class).collect();
        let n = members.len() as f64;
        for dim in 0..2 {
            let batch: f64 = members.iter().map(|s| s.features[dim]).sum::<f64>() / n;
            let stream_mean = lda.class_mean(class)[dim];
            assert!(
                (batch - stream_mean).abs() <= 1e-9 * batch.abs().max(1.0),
                "class {class} dim {dim}: {batch} vs {stream_mean}"
            );
        }
    }

    // Stream determinism and generator moments.
    assert_eq!(collect_stream(&spec).unwrap(), collect_stream(&spec).unwrap());
    let big = StreamSpec {
        length: Some(100_000),
        ..spec.clone()
    };
    let gauss = collect_stream(&big).unwrap();
    let class0: Vec<&LabeledSample> = gauss.iter().filter(|s| s.label == 0).collect();
    let n0 = class0.len() as f64;
    for dim in 0..2 {
        let mean: f64 = class0.iter().map(|s| s.features[dim]).sum::<f64>() / n0;
        assert!(mean.abs() < 3.0 / n0.sqrt(), "class-0 dim {dim} mean {mean}");
    }
    let class1: Vec<&LabeledSample> = gauss.iter().filter(|s| s.label == 1).collect();
    let n1 = class1.len() as f64;
    let mean_x: f64 = class1.iter().map(|s| s.features[0]).sum::<f64>() / n1;
    assert!((mean_x - 2.0).abs() < 6.0 / n1.sqrt(), "class-1 x mean {mean_x}");
    for dim in 0..2 {
        let mu: f64 = class1.iter().map(|s| s.features[dim]).sum::<f64>() / n1;
        let var: f64 =
            class1.iter().map(|s| (s.features[dim] - mu).powi(2)).sum::<f64>() / (n1 - 1.0);
        assert!((var - 4.0).abs() < 0.15, "class-1 dim {dim} variance {var}");
    }

    let sine = collect_stream(&StreamSpec {
        generator: GeneratorKind::Sine,
        change_point: None,
        length: Some(100_000),
        drift_ramp: None,
        seed: 88_088,
    })
    .unwrap();
    let prevalence = sine.iter().filter(|s| s.label == 0).count() as f64 / sine.len() as f64;
    let expected = 1.0 - 1.0f64.cos();
    let tol = 3.0 * (expected * (1.0 - expected) / sine.len() as f64).sqrt();
    assert!(
        (prevalence - expected).abs() < tol,
        "SINE class-0 prevalence {prevalence} vs {expected}"
    );
    println!(
        "[criterion 6] PASS (running mean, z bounds, EWMA laws, monotone thresholds, \
         warning-dominates-drift, LDA-vs-batch, stream determinism, moments)"
    );
}

/// Electricity dataset file: `ECDD_ELEC2_CSV` env var, or `data/elec2.csv`
/// at the workspace root.
fn elec2_path() -> Option<std::path::PathBuf> {
    if let Ok(p) = std::env::var("ECDD_ELEC2_CSV") {
        let p = std::path::PathBuf::from(p);
        return p.exists().then_some(p);
    }
    let default = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/elec2.csv");
    default.exists().then_some(default)
}

#[test]
fn criterion_7_electricity_dataset() {
    let Some(path) = elec2_path() else {
        println!(
            "[criterion 7] SKIP: Electricity dataset not present \
             (set ECDD_ELEC2_CSV or place data/elec2.csv)"
        );
        return;
    };
    let table = CalibrationTable::builtin();
    let stream = electricity_spec(path);
    let samples = collect_stream(&stream).unwrap();
    println!("[criterion 7] dataset rows: {}", samples.len());
    assert_eq!(samples.len(), 45_312);
    assert!(samples.iter().all(|s| s.features.len() == 2));

    let run = |preset: &str, arl: f64| -> f64 {
        let mut spec = parse_preset(
            &format!("elec-{preset}-ecdd-arl{arl}"),
            0.2,
            Some(stream_path(&stream)),
        )
        .unwrap();
        spec.replications = 1;
        run_experiment(&spec, &table, None).unwrap().mean_accuracy
    };
    fn stream_path(spec: &StreamSpec) -> &std::path::Path {
        match &spec.generator {
            GeneratorKind::Csv { path, .. } => path,
            _ => unreachable!(),
        }
    }

    let lda_100 = run("lda", 100.0);
    let knn_100 = run("knn", 100.0);
    println!("[criterion 7] ARL0 100: LDA-ECDD {lda_100:.4} (0.86), KNN-ECDD {knn_100:.4} (0.88)");
    assert!((lda_100 - 0.86).abs() <= 0.03);
    assert!((knn_100 - 0.88).abs() <= 0.03);

    let lda_1000 = run("lda", 1000.0);
    let knn_1000 = run("knn", 1000.0);
    println!(
        "[criterion 7] ARL0 1000: LDA-ECDD {lda_1000:.4} (~0.85), KNN-ECDD {knn_1000:.4} (~0.87)"
    );
    assert!((lda_1000 - 0.85).abs() <= 0.03);
    assert!((knn_1000 - 0.87).abs() <= 0.03);
    assert!(lda_1000 <= lda_100, "accuracy must degrade as ARL0 grows");
    assert!(knn_1000 <= knn_100, "accuracy must degrade as ARL0 grows");
    println!("[criterion 7] PASS");
}
