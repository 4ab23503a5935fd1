//! Writes a run report to text, reads it back and scores it at several
//! accuracy levels.
//!
//! ```text
//! cargo run --release --example rescore_report -- 6
//! ```

use std::error::Error;

use hillvallea::scoring::score_with;
use hillvallea::{benchmarks, run_hillvallea, RunReport};

pub fn run_example(id: u32) -> Result<Vec<usize>, Box<dyn Error>> {
    let spec = benchmarks::get_problem(id)?;
    let report = run_hillvallea(&spec, 9);
    let text = report.to_string();
    let parsed = RunReport::parse(&text, spec.dim())?;
    println!("{} lines of report for {}", text.lines().count(), spec.name);

    let mut found = Vec::new();
    for epsilon in [1e-1, 1e-3, 1e-5] {
        let s = score_with(&parsed.solutions, &spec, epsilon, spec.niche_radius);
        println!("epsilon {epsilon:e}: {} of {} peaks", s.peaks_found, spec.num_global_optima);
        found.push(s.peaks_found);
    }
    Ok(found)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let id = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(6);
    run_example(id)?;
    Ok(())
}
