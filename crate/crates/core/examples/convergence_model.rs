//! Extrapolating a core search's convergence: the estimated rate, the
//! generations still needed to reach the archived fitness, and the verdict.
//!
//! ```text
//! cargo run --example convergence_model
//! ```

use hillvallea::amalgam::{check_convergence_termination, ConvergenceTracker};

pub fn run_example() -> Vec<bool> {
    let b = 0.0;
    let mut verdicts = Vec::new();
    // Gap halves every 5 generations, then every 50.
    for (label, per_gen) in [("fast", 0.5f64.powf(0.2)), ("slow", 0.5f64.powf(0.02))] {
        let mut t = ConvergenceTracker::new(b);
        let mut gap = 1.0;
        for _ in 0..=5 {
            t.record(b + gap);
            gap *= per_gen;
        }
        let rate = t.rate().unwrap_or(0.0);
        let delta = t.delta().unwrap_or(0.0);
        let tto = (1e-12 / delta).ln() / (1.0 - rate).ln();
        for gen_cap in [2, 10, 40] {
            let stop = check_convergence_termination(&t, 5, gen_cap);
            println!("{label}: r = {rate:.6}  tto = {tto:>8.1}  gen_cap {gen_cap:>2} -> terminate: {stop}");
            verdicts.push(stop);
        }
    }
    verdicts
}

#[allow(dead_code)]
fn main() {
    run_example();
}
