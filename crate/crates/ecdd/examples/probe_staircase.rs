//! Probes ARL(L) around a point to expose the staircase structure.

use ecdd::calibration::estimate_arl0;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let p0: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let target: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(400.0);
    let lo: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(4.0);
    let hi: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(4.6);
    let mut l = lo;
    while l <= hi + 1e-9 {
        let est = estimate_arl0(p0, 0.2, l, 50_000, (target * 100.0) as u64, 31_337).unwrap();
        println!("p0={p0} L={l:.3} -> ARL {:8.1} +/- {:.1}", est.mean, est.std_error);
        l += 0.025;
    }
}
