//! Runs the algorithm once on a benchmark problem and prints what it found.
//!
//! ```text
//! cargo run --release --example solve_benchmark -- 4 42
//! ```

use std::error::Error;
use std::time::Instant;

use hillvallea::{benchmarks, run_hillvallea, scoring};

pub fn run_example(id: u32, seed: u64) -> Result<(), Box<dyn Error>> {
    let spec = benchmarks::get_problem(id)?;
    let start = Instant::now();
    let report = run_hillvallea(&spec, seed);
    let elapsed = start.elapsed();
    let mut score = scoring::score(&report.solutions, &spec);
    score.evaluations_used = report.evaluations;

    println!("{} (d = {}), seed {seed}", spec.name, spec.dim());
    println!(
        "peaks {}/{}  PR {:.3}  static F1 {:.3}  evaluations {}/{}  {:.2?}",
        score.peaks_found, spec.num_global_optima, score.peak_ratio, score.static_f1, report.evaluations, spec.budget, elapsed
    );
    println!("{:?}", report.stats);
    if report.solutions.len() <= 12 {
        for s in &report.solutions {
            println!("  x = {:?}  f = {}", s.x, s.f);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let id = args.next().map(|a| a.parse()).transpose()?.unwrap_or(4);
    let seed = args.next().map(|a| a.parse()).transpose()?.unwrap_or(42);
    run_example(id, seed)
}
