//! Hill-Valley Evolutionary Algorithm for real-valued multimodal optimization.
//!
//! A run repeatedly samples a uniform population, splits it into niches with
//! the hill-valley test, and launches a univariate AMaLGaM core search in each
//! niche. Distinct optima are collected in an elitist archive; at the end only
//! those within a small tolerance of the best fitness are reported.
//!
//! ```no_run
//! use hillvallea::{benchmarks, orchestrator, scoring};
//!
//! let spec = benchmarks::get_problem(4).unwrap();
//! let report = orchestrator::run_hillvallea(&spec, 42);
//! let score = scoring::score(&report.solutions, &spec);
//! println!("found {} of {} optima", score.peaks_found, spec.num_global_optima);
//! ```

pub mod amalgam;
pub mod benchmarks;
pub mod campaign;
pub mod hillvalley;
pub mod orchestrator;
pub mod problem;
pub mod scoring;

pub use amalgam::{ConvergenceTracker, CoreSearchState, TerminationReason};
pub use hillvalley::{Cluster, HillValleyOutcome};
pub use orchestrator::{run_hillvallea, ElitistArchive, RunReport};
pub use problem::{BudgetedEvaluator, EvalError, ProblemSpec, Solution};
pub use scoring::Score;
