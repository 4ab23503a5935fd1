//! Solving a user-defined problem: a 2-D landscape with four equal peaks at
//! (±1, ±1), declared with its optima so the result can be scored.
//!
//! ```text
//! cargo run --release --example custom_problem
//! ```

use std::error::Error;

use hillvallea::{run_hillvallea, scoring, ProblemSpec};

pub fn run_example(seed: u64) -> Result<f64, Box<dyn Error>> {
    let spec = ProblemSpec::maximize("four peaks", vec![-2.0, -2.0], vec![2.0, 2.0], 20_000, |x| {
        -(x[0] * x[0] - 1.0).powi(2) - (x[1] * x[1] - 1.0).powi(2)
    })
    .with_optima(
        vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]],
        0.0,
        0.5,
    );
    spec.validate()?;

    let report = run_hillvallea(&spec, seed);
    let score = scoring::score(&report.solutions, &spec);
    println!(
        "{}: {} solutions, PR {:.2}, static F1 {:.2}, {} evaluations",
        spec.name,
        report.solutions.len(),
        score.peak_ratio,
        score.static_f1,
        report.evaluations
    );
    for s in &report.solutions {
        println!("  ({:+.6}, {:+.6})  f = {:.2e}", s.x[0], s.x[1], s.f);
    }
    Ok(score.peak_ratio)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let seed = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(0);
    run_example(seed)?;
    Ok(())
}
