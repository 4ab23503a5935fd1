//! Clusters a uniform sample of Himmelblau's function into its valleys.
//!
//! ```text
//! cargo run --example cluster_landscape -- 256 1
//! ```

use std::error::Error;

use hillvallea::hillvalley::cluster_population;
use hillvallea::{benchmarks, BudgetedEvaluator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns, for each cluster, the index of the valley its best member lies in.
pub fn run_example(n: usize, seed: u64) -> Result<Vec<usize>, Box<dyn Error>> {
    let spec = benchmarks::get_problem(4)?;
    let mut e = BudgetedEvaluator::new(spec);
    let pop = e.uniform_init(n, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|_| "budget too small")?;
    let clusters = cluster_population(&pop, &mut e).map_err(|_| "budget exhausted while clustering")?;

    println!("{n} samples, {} clusters, {} clustering evaluations", clusters.len(), e.used() - n as u64);
    for (i, c) in clusters.iter().enumerate() {
        let best = c.best();
        println!(
            "cluster {i:>2}: {:>4} members, best ({:>7.3}, {:>7.3}) f = {:.3}",
            c.len(),
            best.x[0],
            best.x[1],
            e.spec().orientation.published(best.f)
        );
    }
    let valley = |x: &[f64]| {
        let optima = &e.spec().known_optima;
        (0..optima.len())
            .min_by(|&i, &j| {
                let d = |k: usize| e.spec().normalized_distance(x, &optima[k]);
                d(i).total_cmp(&d(j))
            })
            .unwrap_or(0)
    };
    Ok(clusters.iter().map(|c| valley(&c.best().x)).collect())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map(|a| a.parse()).transpose()?.unwrap_or(256);
    let seed = args.next().map(|a| a.parse()).transpose()?.unwrap_or(1);
    run_example(n, seed)?;
    Ok(())
}
