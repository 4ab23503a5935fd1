//! A small seeded campaign over several benchmarks, printed as CSV.
//!
//! ```text
//! cargo run --release --example campaign -- 1-5 3
//! ```

use std::error::Error;

use hillvallea::campaign::{parse_problem_list, run_campaign, CampaignConfig};

pub fn run_example(problems: &str, runs: usize) -> Result<String, Box<dyn Error>> {
    let config = CampaignConfig {
        problems: parse_problem_list(problems)?,
        runs,
        base_seed: 100,
        ..Default::default()
    };
    let result = run_campaign(&config)?;
    let csv = result.to_csv();
    print!("{csv}");
    for (id, s) in &result.summaries {
        println!("# problem {id}: PR {:.3} (min {:.3})", s.mean_peak_ratio, s.min_peak_ratio);
    }
    Ok(csv)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let problems = args.next().unwrap_or_else(|| "1-5".to_string());
    let runs = args.next().map(|a| a.parse()).transpose()?.unwrap_or(3);
    run_example(&problems, runs)?;
    Ok(())
}
