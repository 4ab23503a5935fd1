//! The outer restart loop: sample, cluster, run one core search per cluster,
//! archive the results and finally drop everything that is not a global
//! optimum candidate.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::amalgam::{self, CoreSearchOutcome, TerminationReason};
use crate::hillvalley::{cluster_population, hill_valley_test, Cluster};
use crate::problem::{BudgetedEvaluator, ProblemSpec, Solution};

/// Test points used when matching a solution against archived elites.
pub const ARCHIVE_TEST_POINTS: usize = 5;
/// Generation cap assumed before any elite has been archived.
pub const DEFAULT_GENERATION_CAP: u64 = 100;
/// Elites further than this above the best fitness are dropped on output.
pub const POSTPROCESS_TOLERANCE: f64 = 1e-5;
/// Initial population size per dimension.
pub const INITIAL_POPULATION_PER_DIM: usize = 64;
pub const POPULATION_GROWTH: usize = 2;
/// Lower bound on a core search's initial standard deviation, as a fraction
/// of the expected edge length of the clustered population (per unit width).
pub const INITIAL_STDDEV_EDGE_FRACTION: f64 = 1.0;
/// Fraction of each sampled population (best first) that is clustered.
pub const CLUSTER_SELECTION_FRACTION: f64 = 1.0;

/// Distinct-niche elites found so far, plus the bookkeeping the core-search
/// terminators rely on.
#[derive(Debug, Clone, Default)]
pub struct ElitistArchive {
    elites: Vec<Solution>,
    insertion_generation: Vec<u64>,
    best_fitness: Option<f64>,
    gen_cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionResult {
    Appended,
    /// The elite at this index shared the niche and was replaced.
    Replaced(usize),
    Discarded,
    BudgetExhausted,
}

impl ElitistArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elites(&self) -> &[Solution] {
        &self.elites
    }

    pub fn insertion_generations(&self) -> &[u64] {
        &self.insertion_generation
    }

    pub fn len(&self) -> usize {
        self.elites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elites.is_empty()
    }

    /// Best internal fitness over all elites.
    pub fn best_fitness(&self) -> Option<f64> {
        self.best_fitness
    }

    /// Largest generation in which an inserting core search found its elite.
    pub fn gen_cap(&self) -> u64 {
        self.gen_cap.unwrap_or(DEFAULT_GENERATION_CAP)
    }

    /// Elite nearest to `x` in box-normalized coordinates.
    pub fn nearest(&self, x: &[f64], spec: &ProblemSpec) -> Option<&Solution> {
        self.nearest_index(x, spec).map(|i| &self.elites[i])
    }

    fn nearest_index(&self, x: &[f64], spec: &ProblemSpec) -> Option<usize> {
        self.elites
            .iter()
            .enumerate()
            .map(|(i, s)| (spec.normalized_distance(x, &s.x), i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, i)| i)
    }

    fn record(&mut self, s: &Solution, gens: u64) {
        self.best_fitness = Some(self.best_fitness.map_or(s.f, |b| b.min(s.f)));
        self.gen_cap = Some(self.gen_cap.map_or(gens, |c| c.max(gens)));
    }
}

/// Inserts `s`, found by a core search in generation `gens`, into the archive.
pub fn archive_insert(a: &mut ElitistArchive, s: Solution, gens: u64, e: &mut BudgetedEvaluator) -> InsertionResult {
    let Some(idx) = a.nearest_index(&s.x, e.spec()) else {
        a.record(&s, gens);
        a.elites.push(s);
        a.insertion_generation.push(gens);
        return InsertionResult::Appended;
    };
    let outcome = match hill_valley_test(&s, &a.elites[idx], ARCHIVE_TEST_POINTS, e) {
        Ok(o) => o,
        Err(_) => return InsertionResult::BudgetExhausted,
    };
    if !outcome.same_niche {
        a.record(&s, gens);
        a.elites.push(s);
        a.insertion_generation.push(gens);
        InsertionResult::Appended
    } else if s.f < a.elites[idx].f {
        a.record(&s, gens);
        a.elites[idx] = s;
        a.insertion_generation[idx] = gens;
        InsertionResult::Replaced(idx)
    } else {
        InsertionResult::Discarded
    }
}

/// Elites within [`POSTPROCESS_TOLERANCE`] of the best archived fitness.
pub fn postprocess_archive(a: &ElitistArchive) -> Vec<Solution> {
    let Some(b) = a.best_fitness() else {
        return Vec::new();
    };
    a.elites
        .iter()
        .filter(|s| s.f <= b + POSTPROCESS_TOLERANCE)
        .cloned()
        .collect()
}

/// Population sizes of successive restart rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartSchedule {
    pub round: u32,
    pub pop_size: usize,
}

impl RestartSchedule {
    pub fn new(dim: usize) -> Self {
        Self {
            round: 0,
            pop_size: INITIAL_POPULATION_PER_DIM * dim,
        }
    }

    pub fn advance(&mut self) {
        self.round += 1;
        self.pop_size *= POPULATION_GROWTH;
    }
}

/// Minimum core-search population size for dimension `d`.
pub fn core_population_floor(d: usize) -> usize {
    8 + (2.0 * (d as f64).sqrt()).ceil() as usize
}

/// Counters describing how a run spent its budget.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub rounds: u32,
    pub clusters: usize,
    pub skipped_clusters: usize,
    pub core_searches: usize,
    pub reexplored: usize,
    pub local_minimum_predicted: usize,
    pub converged: usize,
    pub maxed_out: usize,
    pub archive_size: usize,
    /// Evaluations spent on uniform sampling, clustering, pre-checks,
    /// core searches and archive matching.
    pub sampling_evals: u64,
    pub clustering_evals: u64,
    pub precheck_evals: u64,
    pub core_search_evals: u64,
    pub archive_evals: u64,
}

impl RunStats {
    fn count(&mut self, reason: TerminationReason) {
        self.core_searches += 1;
        match reason {
            TerminationReason::ReexploredNiche => self.reexplored += 1,
            TerminationReason::LocalMinimumPredicted => self.local_minimum_predicted += 1,
            TerminationReason::Converged => self.converged += 1,
            TerminationReason::MaxedOut => self.maxed_out += 1,
            TerminationReason::BudgetExhausted => {}
        }
    }
}

/// Result of one run. Solutions carry published-orientation fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub problem_id: u32,
    pub seed: u64,
    pub evaluations: u64,
    pub solutions: Vec<Solution>,
    pub stats: RunStats,
}

/// Runs the full algorithm on `spec` until its budget is spent.
pub fn run_hillvallea(spec: &ProblemSpec, seed: u64) -> RunReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = BudgetedEvaluator::new(spec.clone());
    let mut archive = ElitistArchive::new();
    let mut stats = RunStats::default();
    let mut schedule = RestartSchedule::new(spec.dim());
    let floor = core_population_floor(spec.dim());

    'rounds: loop {
        stats.rounds += 1;
        let before = e.used();
        let sampled = e.uniform_init(schedule.pop_size, &mut rng);
        stats.sampling_evals += e.used() - before;
        let pop = match sampled {
            Ok(pop) => pop,
            Err(partial) => {
                if archive.is_empty() {
                    if let Some(best) = partial.partial.into_iter().min_by(|a, b| a.f.total_cmp(&b.f)) {
                        archive_insert(&mut archive, best, 0, &mut e);
                    }
                }
                break;
            }
        };
        let selected = truncate(pop, CLUSTER_SELECTION_FRACTION);
        let selected_len = selected.len();
        let before = e.used();
        let clustered = cluster_population(&selected, &mut e);
        stats.clustering_evals += e.used() - before;
        let mut clusters = match clustered {
            Ok(c) => c,
            Err(_) => break,
        };
        clusters.sort_by(|a, b| a.best().f.total_cmp(&b.best().f));
        let initial_stddev = INITIAL_STDDEV_EDGE_FRACTION * (1.0 / selected_len as f64).powf(1.0 / spec.dim() as f64);
        stats.clusters += clusters.len();

        for cluster in &clusters {
            if let Some(elite) = archive.nearest(&cluster.best().x, spec).cloned() {
                let before = e.used();
                let tested = hill_valley_test(cluster.best(), &elite, ARCHIVE_TEST_POINTS, &mut e);
                stats.precheck_evals += e.used() - before;
                match tested {
                    Ok(o) if o.same_niche => {
                        stats.skipped_clusters += 1;
                        continue;
                    }
                    Ok(_) => {}
                    Err(_) => break 'rounds,
                }
            }
            let before = e.used();
            let outcome = launch_core_search(cluster, floor, initial_stddev, &archive, &mut e, &mut rng);
            stats.core_search_evals += e.used() - before;
            stats.count(outcome.reason);
            let before = e.used();
            let inserted = archive_insert(&mut archive, outcome.best, outcome.best_generation, &mut e);
            stats.archive_evals += e.used() - before;
            if outcome.reason == TerminationReason::BudgetExhausted || inserted == InsertionResult::BudgetExhausted {
                break 'rounds;
            }
        }
        if e.is_exhausted() {
            break;
        }
        schedule.advance();
    }

    stats.archive_size = archive.len();
    let solutions = postprocess_archive(&archive)
        .into_iter()
        .map(|s| Solution::new(s.x, spec.orientation.published(s.f)))
        .collect();
    RunReport {
        problem_id: spec.id,
        seed,
        evaluations: e.used(),
        solutions,
        stats,
    }
}

fn truncate(mut pop: Vec<Solution>, fraction: f64) -> Vec<Solution> {
    let keep = ((fraction * pop.len() as f64).ceil() as usize).clamp(1.min(pop.len()), pop.len());
    pop.sort_by(|a, b| a.f.total_cmp(&b.f));
    pop.truncate(keep);
    pop
}

fn launch_core_search(
    cluster: &Cluster,
    floor: usize,
    min_relative_stddev: f64,
    archive: &ElitistArchive,
    e: &mut BudgetedEvaluator,
    rng: &mut ChaCha8Rng,
) -> CoreSearchOutcome {
    let pop_size = cluster.len().max(floor);
    let gen_cap = archive.gen_cap();
    match amalgam::init_from_cluster_with(cluster, pop_size, min_relative_stddev, e, rng) {
        Ok(state) => amalgam::run_from_state(state, archive, e, rng, gen_cap),
        Err(_) => CoreSearchOutcome {
            best: cluster.best().clone(),
            reason: TerminationReason::BudgetExhausted,
            generations: 0,
            best_generation: 0,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ReportParseError {
    pub line: usize,
    pub message: String,
}

impl RunReport {
    /// Parses the line-oriented report format written by `Display`.
    ///
    /// Header lines (`problem`, `seed`, `evaluations`) are optional; every other
    /// non-blank line must hold `dim` coordinates followed by the fitness.
    pub fn parse(text: &str, dim: usize) -> Result<Self, ReportParseError> {
        let mut report = RunReport {
            problem_id: 0,
            seed: 0,
            evaluations: 0,
            solutions: Vec::new(),
            stats: RunStats::default(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let err = |message: String| ReportParseError { line, message };
            let mut fields = content.split_whitespace();
            let head = fields.next().unwrap_or_default();
            match head {
                "problem" | "seed" | "evaluations" => {
                    let value = fields.next().ok_or_else(|| err(format!("missing value for `{head}`")))?;
                    if fields.next().is_some() {
                        return Err(err(format!("trailing data after `{head}`")));
                    }
                    match head {
                        "problem" => report.problem_id = parse_field(value).map_err(err)?,
                        "seed" => report.seed = parse_field(value).map_err(err)?,
                        _ => report.evaluations = parse_field(value).map_err(err)?,
                    }
                }
                _ => {
                    let values: Vec<f64> = content
                        .split_whitespace()
                        .map(parse_field::<f64>)
                        .collect::<Result<_, _>>()
                        .map_err(err)?;
                    if values.len() != dim + 1 {
                        return Err(err(format!(
                            "expected {} coordinates and a fitness value, found {} values",
                            dim,
                            values.len()
                        )));
                    }
                    let f = values[dim];
                    report.solutions.push(Solution::new(values[..dim].to_vec(), f));
                }
            }
        }
        Ok(report)
    }
}

fn parse_field<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid number `{value}`"))
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem {}", self.problem_id)?;
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "evaluations {}", self.evaluations)?;
        for s in &self.solutions {
            for v in &s.x {
                write!(f, "{v} ")?;
            }
            writeln!(f, "{}", s.f)?;
        }
        Ok(())
    }
}
