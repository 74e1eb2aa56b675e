//! Runs the acceptance benchmark cells at 5000 replications and prints the
//! simulated accuracies against the targets.

use ecdd::calibration::CalibrationTable;
use ecdd::harness::run_experiment;
use ecdd::presets::parse_preset;

fn main() {
    let table = CalibrationTable::builtin();
    let cells: &[(&str, f64, f64)] = &[
        ("gauss200-lda-ecdd-arl600", 0.2, 0.71),
        ("sine200-lda-ecdd-arl600", 0.2, 0.90),
        ("gauss200-lda-ecddwt-arl600", 0.2, 0.72),
        ("sine200-knn-ecdd-arl600", 0.2, 0.91),
        ("gauss200-lda-none", 0.2, 0.52),
        ("gauss50-lda-ecdd-arl100", 0.2, 0.63),
        ("sine50-lda-ecdd-arl100", 0.2, 0.79),
        ("gauss50-knn-ecddwt-arl100", 0.2, 0.66),
        ("gauss200-lda-ecdd-arl100", 0.2, 0.71),
        ("sine200-lda-ecdd-arl100", 0.2, 0.89),
        ("gauss50-lda-ecdd-arl600", 0.2, 0.59),
        ("sine50-lda-ecdd-arl600", 0.2, 0.77),
        ("gauss200-lda-ecdd-arl600", 0.1, 0.73),
        ("sine200-lda-ecdd-arl600", 0.1, 0.91),
        ("gauss200-lda-ecdd-arl600", 0.3, 0.72),
        ("sine200-lda-ecdd-arl600", 0.3, 0.89),
        ("driftgauss-lda-ecdd-arl400", 0.2, 0.68),
        ("driftsine-lda-ecdd-arl400", 0.2, 0.86),
        ("driftgauss-lda-ecddwt-arl400", 0.2, 0.68),
    ];
    for &(name, lambda, target) in cells {
        let mut spec = parse_preset(name, lambda, None).unwrap();
        spec.replications = 5000;
        let t0 = std::time::Instant::now();
        let report = run_experiment(&spec, &table, None).unwrap();
        println!(
            "{name:<34} lambda={lambda} sim={:.4} target={target} delta={:+.4} sd={:.3} dets={} [{:.1}s]",
            report.mean_accuracy,
            report.mean_accuracy - target,
            report.std_error,
            report.detections.len(),
            t0.elapsed().as_secs_f64()
        );
    }
}
