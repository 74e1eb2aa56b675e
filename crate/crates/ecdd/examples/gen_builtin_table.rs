//! Regenerates `data/fitted-table.json`, the calibration table bundled into
//! the library. Run with `cargo run --release -p ecdd --example
//! gen_builtin_table` from the workspace root; takes a few minutes.

use ecdd::calibration::{
    default_grid, estimate_arl0, fit_table_entry, CalibrationTable, DEFAULT_BASIS_POWERS,
};
use ecdd::seed;

const SEED: u64 = 7150;
const SEARCH_REPS: u64 = 20_000;
const VERIFY_REPS: u64 = 50_000;

fn main() {
    let points = default_grid();
    let combos: &[(f64, f64)] = &[
        (0.2, 100.0),
        (0.2, 400.0),
        (0.2, 600.0),
        (0.2, 1000.0),
        (0.1, 600.0),
        (0.3, 600.0),
    ];
    let mut table = CalibrationTable::new();
    for (i, &(lambda, arl0)) in combos.iter().enumerate() {
        let t0 = std::time::Instant::now();
        let entry = fit_table_entry(
            lambda,
            arl0,
            &points,
            &DEFAULT_BASIS_POWERS,
            SEARCH_REPS,
            seed::derive(SEED, i as u64),
        )
        .unwrap_or_else(|e| panic!("fit lambda={lambda} arl0={arl0}: {e}"));
        eprintln!(
            "fitted lambda={lambda} arl0={arl0} in {:.1}s: coeffs {:?}",
            t0.elapsed().as_secs_f64(),
            entry.coefficients
        );
        table.insert(entry).unwrap();
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fitted-table.json");
    table.save(std::path::Path::new(path)).unwrap();
    eprintln!("wrote {path}");

    // Verify the round trip at representative points.
    for entry in &table.entries {
        for &p0 in &[0.05, 0.1, 0.2, 0.3, 0.45] {
            let limit = entry.eval_clamped(p0);
            let est = estimate_arl0(
                p0,
                entry.lambda,
                limit,
                VERIFY_REPS,
                (100.0 * entry.arl0).ceil() as u64,
                seed::derive(SEED, 10_000),
            )
            .unwrap();
            let rel = (est.mean / entry.arl0 - 1.0) * 100.0;
            eprintln!(
                "verify lambda={} arl0={}: p0={p0:<4} L={limit:.4} -> ARL {:>8.1} ({rel:+.1}%)",
                entry.lambda, entry.arl0, est.mean
            );
            assert!(
                rel.abs() < 10.0,
                "round trip failed for lambda={} arl0={} at p0={p0}",
                entry.lambda,
                entry.arl0
            );
        }
    }

}
