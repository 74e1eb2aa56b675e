//! Prints the Monte Carlo values frozen into the regression tests.

use ecdd::calibration::{estimate_arl0, CalibrationTable};
use ecdd::detector::{Detector, DetectorConfig, DetectorStatus};
use ecdd::seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_SEED: u64 = 1_000_003;
const REPS: u64 = 10_000;

/// Straight-line adaptive-chart oracle with the reference ARL0=400
/// polynomial inlined (Horner form), independent of the library path.
fn oracle_detection_time(rep: u64) -> Option<u64> {
    let lambda = 0.2_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(ORACLE_SEED, rep));
    let mut z = 0.0_f64;
    let mut errors = 0u64;
    for t in 1..=1000u64 {
        let p = if t <= 200 { 0.2 } else { 0.8 };
        let x = f64::from(rng.random::<f64>() < p);
        errors += x as u64;
        let p_hat = errors as f64 / t as f64;
        let sigma_x = (p_hat * (1.0 - p_hat)).sqrt();
        let transient = 1.0 - (1.0 - lambda).powi(2).powf(t as f64);
        let sigma_z = (lambda / (2.0 - lambda) * transient).sqrt() * sigma_x;
        let pc = p_hat.clamp(0.01, 0.99);
        let pc2 = pc * pc;
        let limit = 3.97 + pc * (-6.56 + pc2 * (48.73 + pc2 * (-330.13 + pc2 * 848.18)));
        z = (1.0 - lambda) * z + lambda * x;
        if z > p_hat + limit * sigma_z {
            return Some(t);
        }
    }
    None
}

fn library_detection_time(rep: u64, table: &CalibrationTable) -> Option<u64> {
    let config = DetectorConfig {
        lambda: 0.2,
        target_arl0: 400.0,
        warning_fraction: 0.5,
        min_observations: 0,
        warning_buffer_cap: None,
    };
    let mut det: Detector<()> = Detector::new(config, table).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(ORACLE_SEED, rep));
    for t in 1..=1000u64 {
        let p = if t <= 200 { 0.2 } else { 0.8 };
        let bit = u8::from(rng.random::<f64>() < p);
        if det.step(bit, None).unwrap() == DetectorStatus::Drift {
            return Some(t);
        }
    }
    None
}

fn main() {
    let table = CalibrationTable::paper_lambda02();
    let mut oracle_delays = 0u64;
    let mut oracle_detected = 0u64;
    let mut oracle_false = 0u64;
    let mut mismatches = 0u64;
    for rep in 0..REPS {
        let o = oracle_detection_time(rep);
        let l = library_detection_time(rep, &table);
        if o != l {
            mismatches += 1;
        }
        match o {
            Some(t) if t > 200 => {
                oracle_delays += t - 200;
                oracle_detected += 1;
            }
            Some(_) => oracle_false += 1,
            None => {}
        }
    }
    let mean_delay = oracle_delays as f64 / oracle_detected as f64;
    println!("oracle mean delay   = {mean_delay:.10}");
    println!("oracle detected     = {oracle_detected}");
    println!("oracle false alarms = {oracle_false}");
    println!("oracle vs library mismatched reps = {mismatches}");

    let est = estimate_arl0(0.5, 0.2, 0.0, 100_000, 10_000, 5).unwrap();
    println!("estimate_arl0(0.5, 0.2, L=0) mean = {:.10} se = {:.6}", est.mean, est.std_error);
}
