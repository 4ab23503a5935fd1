//! One core search in three situations: an empty archive, a niche that is
//! already archived, and a local basin once the global optimum is known.
//!
//! ```text
//! cargo run --example core_search
//! ```

use std::error::Error;

use hillvallea::amalgam::{run_core_search, TerminationReason};
use hillvallea::hillvalley::Cluster;
use hillvallea::orchestrator::{archive_insert, core_population_floor, ElitistArchive};
use hillvallea::{BudgetedEvaluator, ProblemSpec, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tilted(x: f64) -> f64 {
    (x * x - 1.0).powi(2) + 0.3 * x
}

pub fn run_example(seed: u64) -> Result<Vec<TerminationReason>, Box<dyn Error>> {
    let spec = ProblemSpec::minimize("tilted double well", vec![-2.0], vec![2.0], 100_000, |x| tilted(x[0]));
    let mut e = BudgetedEvaluator::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pop_size = core_population_floor(1);
    let mut cluster = |e: &mut BudgetedEvaluator, lo: f64, hi: f64| -> Result<Cluster, Box<dyn Error>> {
        let members = (0..pop_size)
            .map(|_| e.evaluate(vec![rng.random_range(lo..hi)]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Cluster::from_members(members).ok_or("empty cluster")?)
    };
    let left = cluster(&mut e, -1.5, -0.5)?;
    let left_again = cluster(&mut e, -1.5, -0.5)?;
    let right = cluster(&mut e, 0.5, 1.5)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut archive = ElitistArchive::new();
    let mut reasons = Vec::new();
    for (label, c) in [("global basin", &left), ("same basin again", &left_again), ("local basin", &right)] {
        let before = e.used();
        let out = run_core_search(c, pop_size, &archive, &mut e, &mut rng, archive.gen_cap());
        println!(
            "{label:<17} {:?} after {} generations, {} evaluations, best x = {:.6} f = {:.6}",
            out.reason,
            out.generations,
            e.used() - before,
            out.best.x[0],
            out.best.f
        );
        if archive.is_empty() {
            archive_insert(&mut archive, Solution::new(out.best.x.clone(), out.best.f), out.best_generation, &mut e);
        }
        reasons.push(out.reason);
    }
    Ok(reasons)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let seed = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(3);
    run_example(seed)?;
    Ok(())
}
