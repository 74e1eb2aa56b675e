//! Dumps searched control limits over a p0 grid as CSV (for fit diagnostics).

use ecdd::calibration::{find_limit, grid};
use rayon::prelude::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lambda: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let target: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(100.0);
    let mut points = grid(0.01, 0.5, 0.01);
    for extra in [
        0.012, 0.015, 0.018, 0.022, 0.025, 0.028, 0.032, 0.035, 0.045, 0.055, 0.065, 0.075,
        0.085, 0.095,
    ] {
        points.push(extra);
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let limits: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, &p0)| find_limit(p0, lambda, target, 20_000, 0.02, 7151 + i as u64))
        .collect();
    println!("p0,limit");
    for (p, l) in points.iter().zip(&limits) {
        match l {
            Ok(l) => println!("{p},{l}"),
            Err(e) => eprintln!("skip p0={p}: {e}"),
        }
    }
}
