//! Univariate AMaLGaM core search with niche-aware termination.
//!
//! A core search fits an axis-aligned Gaussian to the best fraction of its
//! population every generation and adapts a distribution multiplier from
//! the success of its offspring. Besides the usual variance-collapse stop,
//! two rules end searches early:
//!
//! * every fifth generation the best solution is hill-valley tested against
//!   the nearest archived elite, and the search stops if they share a niche;
//! * under an exponential-convergence model, the gap between the selection's
//!   mean fitness and the best archived fitness is extrapolated, and the
//!   search stops if the target gap would be reached too late.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::hillvalley::{hill_valley_test, Cluster};
use crate::orchestrator::ElitistArchive;
use crate::problem::{BudgetedEvaluator, EvalError, Solution};

/// Fraction of the population used to fit the model.
pub const SELECTION_FRACTION: f64 = 0.35;
pub const MULTIPLIER_DECREASE: f64 = 0.9;
pub const MULTIPLIER_INCREASE: f64 = 1.0 / MULTIPLIER_DECREASE;
pub const SDR_THRESHOLD: f64 = 1.0;
/// Offspring shifted along the mean displacement are moved this many displacements.
pub const AMS_FACTOR: f64 = 2.0;
/// Relative per-dimension standard-deviation floor (times the interval width).
pub const STDDEV_FLOOR: f64 = 1e-15;
/// Stop once every `stddev * multiplier` falls below this.
pub const STDDEV_TOLERANCE: f64 = 1e-12;
/// Stop once the selection's fitness range falls below this.
pub const FITNESS_TOLERANCE: f64 = 1e-14;
pub const GENERATION_CEILING: u64 = 2000;
pub const REEXPLORATION_INTERVAL: u64 = 5;
pub const REEXPLORATION_TEST_POINTS: usize = 5;
/// Window `n` of the convergence-rate estimate.
pub const CONVERGENCE_WINDOW: usize = 5;
/// Fitness gap regarded as having reached the optimum.
pub const TARGET_GAP: f64 = 1e-12;
pub const GENERATION_CAP_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    ReexploredNiche,
    LocalMinimumPredicted,
    MaxedOut,
    BudgetExhausted,
    Converged,
}

#[derive(Debug, Clone)]
pub struct CoreSearchState {
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
    pub multiplier: f64,
    pub population: Vec<Solution>,
    pub generation: u64,
    pub best: Solution,
    /// Generation in which `best` was found.
    pub best_generation: u64,
    pub no_improvement_stretch: u32,
    /// Mean fitness of the most recent selection.
    pub selection_fitness: f64,
    /// Fitness range (worst minus best) of the most recent selection.
    pub selection_spread: f64,
    pub pop_size: usize,
    floor: Vec<f64>,
}

impl CoreSearchState {
    /// Largest effective sampling width over all dimensions.
    pub fn max_scaled_stddev(&self) -> f64 {
        self.stddev
            .iter()
            .fold(0.0f64, |m, s| m.max(s * self.multiplier))
    }
}

fn max_no_improvement_stretch(dim: usize) -> u32 {
    25 + dim as u32
}

fn sample_gaussian<R: Rng + ?Sized>(
    mean: &[f64],
    stddev: &[f64],
    multiplier: f64,
    rng: &mut R,
) -> Vec<f64> {
    mean.iter()
        .zip(stddev)
        .map(|(m, s)| {
            let z: f64 = rng.sample(StandardNormal);
            m + multiplier * s * z
        })
        .collect()
}

/// Initializes a core search from a cluster. See [`init_from_cluster_with`].
pub fn init_from_cluster<R: Rng + ?Sized>(
    cluster: &Cluster,
    pop_size: usize,
    e: &mut BudgetedEvaluator,
    rng: &mut R,
) -> Result<CoreSearchState, EvalError> {
    init_from_cluster_with(cluster, pop_size, 0.0, e, rng)
}

/// Initializes a core search from a cluster.
///
/// The model is the members' mean and per-dimension sample standard
/// deviation, floored at `max(STDDEV_FLOOR, min_relative_stddev)` times the
/// interval width. The members seed the population, which is topped up to
/// `pop_size` by sampling the model.
pub fn init_from_cluster_with<R: Rng + ?Sized>(
    cluster: &Cluster,
    pop_size: usize,
    min_relative_stddev: f64,
    e: &mut BudgetedEvaluator,
    rng: &mut R,
) -> Result<CoreSearchState, EvalError> {
    let spec = e.spec().clone();
    let d = spec.dim();
    let members = &cluster.members;
    let n = members.len() as f64;

    let mut mean = vec![0.0; d];
    for s in members {
        for (m, v) in mean.iter_mut().zip(&s.x) {
            *m += v / n;
        }
    }
    let mut stddev = vec![0.0; d];
    if members.len() > 1 {
        for s in members {
            for ((acc, v), m) in stddev.iter_mut().zip(&s.x).zip(&mean) {
                *acc += (v - m).powi(2);
            }
        }
        for acc in stddev.iter_mut() {
            *acc = (*acc / (n - 1.0)).sqrt();
        }
    }
    let floor: Vec<f64> = spec
        .lower
        .iter()
        .zip(&spec.upper)
        .map(|(lo, hi)| STDDEV_FLOOR * (hi - lo))
        .collect();
    for (i, s) in stddev.iter_mut().enumerate() {
        let width = spec.upper[i] - spec.lower[i];
        *s = s.max(floor[i]).max(min_relative_stddev * width);
    }

    let mut population = members.clone();
    let best = cluster.best().clone();
    let mut state = CoreSearchState {
        mean,
        stddev,
        multiplier: 1.0,
        population: Vec::new(),
        generation: 0,
        best,
        best_generation: 0,
        no_improvement_stretch: 0,
        selection_fitness: f64::NAN,
        selection_spread: f64::INFINITY,
        pop_size: pop_size.max(1),
        floor,
    };
    while population.len() < pop_size {
        let mut x = sample_gaussian(&state.mean, &state.stddev, 1.0, rng);
        spec.clamp(&mut x);
        let s = e.evaluate(x)?;
        if s.f < state.best.f {
            state.best = s.clone();
        }
        population.push(s);
    }
    state.population = population;
    Ok(state)
}

/// Advances the search by one generation.
///
/// Selects the best `ceil(SELECTION_FRACTION * pop_size)` solutions, refits
/// the Gaussian by maximum likelihood, samples `pop_size - 1` offspring (the
/// first share of them displaced along the mean shift) and keeps the previous
/// best as the single elitist survivor.
pub fn generation_step<R: Rng + ?Sized>(
    s: &mut CoreSearchState,
    e: &mut BudgetedEvaluator,
    rng: &mut R,
) -> Result<(), EvalError> {
    let spec = e.spec().clone();
    let d = spec.dim();

    s.population.sort_by(|a, b| a.f.total_cmp(&b.f));
    let n_sel = ((SELECTION_FRACTION * s.pop_size as f64).ceil() as usize)
        .clamp(1, s.population.len());
    let selection = &s.population[..n_sel];
    s.selection_fitness = selection.iter().map(|p| p.f).sum::<f64>() / n_sel as f64;
    s.selection_spread = selection[n_sel - 1].f - selection[0].f;

    let mut mean = vec![0.0; d];
    for p in selection {
        for (m, v) in mean.iter_mut().zip(&p.x) {
            *m += v / n_sel as f64;
        }
    }
    let mut stddev = vec![0.0; d];
    for p in selection {
        for ((acc, v), m) in stddev.iter_mut().zip(&p.x).zip(&mean) {
            *acc += (v - m).powi(2);
        }
    }
    for (acc, floor) in stddev.iter_mut().zip(&s.floor) {
        *acc = (*acc / n_sel as f64).sqrt().max(*floor);
    }
    let shift: Vec<f64> = mean.iter().zip(&s.mean).map(|(new, old)| new - old).collect();
    s.mean = mean;
    s.stddev = stddev;

    let n_offspring = s.pop_size.saturating_sub(1).max(1);
    let n_shifted = ((0.5 * SELECTION_FRACTION * s.pop_size as f64).ceil() as usize).min(n_offspring);
    let previous_best = s.best.clone();
    let mut offspring = Vec::with_capacity(n_offspring);
    let mut outcome = Ok(());
    for k in 0..n_offspring {
        let mut x = sample_gaussian(&s.mean, &s.stddev, s.multiplier, rng);
        if k < n_shifted {
            for (v, sh) in x.iter_mut().zip(&shift) {
                *v += AMS_FACTOR * s.multiplier * sh;
            }
        }
        spec.clamp(&mut x);
        match e.evaluate(x) {
            Ok(child) => offspring.push(child),
            Err(err) => {
                outcome = Err(err);
                break;
            }
        }
    }

    adapt_multiplier(s, &previous_best, &offspring, d);

    let generation = s.generation + 1;
    for child in &offspring {
        if child.f < s.best.f {
            s.best = child.clone();
            s.best_generation = generation;
        }
    }
    let mut population = Vec::with_capacity(offspring.len() + 1);
    population.push(previous_best);
    population.extend(offspring);
    s.population = population;
    if outcome.is_ok() {
        s.generation = generation;
    }
    outcome
}

fn adapt_multiplier(s: &mut CoreSearchState, previous_best: &Solution, offspring: &[Solution], d: usize) {
    let improvements: Vec<&Solution> = offspring.iter().filter(|c| c.f < previous_best.f).collect();
    let nis_max = max_no_improvement_stretch(d);
    if !improvements.is_empty() {
        s.no_improvement_stretch = 0;
        if s.multiplier < 1.0 {
            s.multiplier = 1.0;
        }
        let k = improvements.len() as f64;
        let sdr = (0..d)
            .map(|i| {
                let avg = improvements.iter().map(|c| c.x[i]).sum::<f64>() / k;
                (avg - s.mean[i]).abs() / s.stddev[i]
            })
            .fold(0.0f64, f64::max);
        if sdr > SDR_THRESHOLD {
            s.multiplier *= MULTIPLIER_INCREASE;
        }
    } else {
        if s.multiplier <= 1.0 {
            s.no_improvement_stretch += 1;
        }
        if s.multiplier > 1.0 || s.no_improvement_stretch >= nis_max {
            s.multiplier *= MULTIPLIER_DECREASE;
        }
        if s.multiplier < 1.0 && s.no_improvement_stretch < nis_max {
            s.multiplier = 1.0;
        }
    }
}

/// Hill-valley tests the search's best against the nearest archived elite.
///
/// Returns `true` when they share a niche. Budget exhaustion yields `false`.
pub fn check_reexploration(s: &CoreSearchState, archive: &ElitistArchive, e: &mut BudgetedEvaluator) -> bool {
    let Some(elite) = archive.nearest(&s.best.x, e.spec()).cloned() else {
        return false;
    };
    match hill_valley_test(&s.best, &elite, REEXPLORATION_TEST_POINTS, e) {
        Ok(outcome) => outcome.same_niche,
        Err(_) => false,
    }
}

/// Windowed record of selection fitness for the exponential-convergence model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTracker {
    /// Reference (best archived) fitness.
    b: f64,
    /// Most recent selection mean fitness values, oldest first.
    history: VecDeque<f64>,
    window: usize,
    consecutive_improvements: usize,
}

impl ConvergenceTracker {
    pub fn new(b: f64) -> Self {
        Self::with_window(b, CONVERGENCE_WINDOW)
    }

    pub fn with_window(b: f64, window: usize) -> Self {
        Self {
            b,
            history: VecDeque::with_capacity(window + 1),
            window,
            consecutive_improvements: 0,
        }
    }

    pub fn reference(&self) -> f64 {
        self.b
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Records the mean selection fitness of the latest generation.
    pub fn record(&mut self, selection_fitness: f64) {
        match self.history.back() {
            Some(&last) if selection_fitness - self.b < last - self.b => self.consecutive_improvements += 1,
            _ => self.consecutive_improvements = 0,
        }
        self.history.push_back(selection_fitness);
        while self.history.len() > self.window + 1 {
            self.history.pop_front();
        }
    }

    pub fn is_full(&self) -> bool {
        self.history.len() > self.window
    }

    pub fn consecutive_improvements(&self) -> usize {
        self.consecutive_improvements
    }

    /// Current gap to the reference fitness.
    pub fn delta(&self) -> Option<f64> {
        self.history.back().map(|a| a - self.b)
    }

    /// Gap `window` generations ago.
    pub fn delta_window_start(&self) -> Option<f64> {
        if self.is_full() {
            self.history.front().map(|a| a - self.b)
        } else {
            None
        }
    }

    /// Estimated per-generation convergence rate over the window.
    pub fn rate(&self) -> Option<f64> {
        Some(convergence_rate(self.delta_window_start()?, self.delta()?, self.window))
    }
}

/// Rate `r` such that `then * (1 - r)^n = now`.
pub fn convergence_rate(delta_then: f64, delta_now: f64, n: usize) -> f64 {
    1.0 - (1.0 - (delta_then - delta_now) / delta_then).powf(1.0 / n as f64)
}

/// Generations until the gap reaches [`TARGET_GAP`] at a constant rate `r`.
pub fn time_to_optimum(delta_now: f64, rate: f64) -> f64 {
    (TARGET_GAP / delta_now).ln() / (1.0 - rate).ln()
}

/// [`time_to_optimum`] expressed directly in terms of the window endpoints.
pub fn time_to_optimum_from_window(delta_then: f64, delta_now: f64, n: usize) -> f64 {
    (TARGET_GAP / delta_now).ln() / ((delta_now / delta_then).ln() / n as f64)
}

/// Decides whether a search is predicted to need too long to reach the archived
/// best fitness and is therefore converging to a local optimum.
pub fn check_convergence_termination(t: &ConvergenceTracker, g: u64, gen_cap: u64) -> bool {
    let (Some(delta_now), Some(delta_then)) = (t.delta(), t.delta_window_start()) else {
        return false;
    };
    if delta_now < 0.0 {
        return false;
    }
    let rate = convergence_rate(delta_then, delta_now, t.window);
    if !(rate > 0.0) {
        return false;
    }
    if t.consecutive_improvements < t.window {
        return false;
    }
    let tto = time_to_optimum_from_window(delta_then, delta_now, t.window);
    g as f64 + tto > GENERATION_CAP_FACTOR * gen_cap as f64
}

#[derive(Debug, Clone)]
pub struct CoreSearchOutcome {
    pub best: Solution,
    pub reason: TerminationReason,
    pub generations: u64,
    /// Generation in which `best` was found.
    pub best_generation: u64,
}

/// Initializes a core search on `cluster` and runs it to termination.
pub fn run_core_search<R: Rng + ?Sized>(
    cluster: &Cluster,
    pop_size: usize,
    archive: &ElitistArchive,
    e: &mut BudgetedEvaluator,
    rng: &mut R,
    gen_cap: u64,
) -> CoreSearchOutcome {
    match init_from_cluster(cluster, pop_size, e, rng) {
        Ok(state) => run_from_state(state, archive, e, rng, gen_cap),
        Err(_) => CoreSearchOutcome {
            best: cluster.best().clone(),
            reason: TerminationReason::BudgetExhausted,
            generations: 0,
            best_generation: 0,
        },
    }
}

/// Runs an initialized core search until one of its termination rules fires.
pub fn run_from_state<R: Rng + ?Sized>(
    mut state: CoreSearchState,
    archive: &ElitistArchive,
    e: &mut BudgetedEvaluator,
    rng: &mut R,
    gen_cap: u64,
) -> CoreSearchOutcome {
    let mut tracker = archive.best_fitness().map(ConvergenceTracker::new);
    let reason = loop {
        if e.is_exhausted() {
            break TerminationReason::BudgetExhausted;
        }
        if state.generation >= GENERATION_CEILING {
            break TerminationReason::MaxedOut;
        }
        if generation_step(&mut state, e, rng).is_err() {
            break TerminationReason::BudgetExhausted;
        }
        if let Some(t) = tracker.as_mut() {
            t.record(state.selection_fitness);
        }
        if state.generation.is_multiple_of(REEXPLORATION_INTERVAL)
            && !archive.is_empty()
            && check_reexploration(&state, archive, e)
        {
            break TerminationReason::ReexploredNiche;
        }
        if let Some(t) = tracker.as_ref() {
            if check_convergence_termination(t, state.generation, gen_cap) {
                break TerminationReason::LocalMinimumPredicted;
            }
        }
        if state.max_scaled_stddev() < STDDEV_TOLERANCE || state.selection_spread < FITNESS_TOLERANCE {
            break TerminationReason::Converged;
        }
    };
    CoreSearchOutcome {
        best: state.best,
        reason,
        generations: state.generation,
        best_generation: state.best_generation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_sphere(budget: u64) -> BudgetedEvaluator {
        BudgetedEvaluator::new(ProblemSpec::minimize("sphere", vec![-10.0], vec![10.0], budget, |x| x[0] * x[0]))
    }

    #[test]
    fn init_single_member_uses_floor() {
        let mut e = line_sphere(100);
        let c = Cluster::new(Solution::new(vec![3.0], 9.0));
        let s = init_from_cluster(&c, 1, &mut e, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(s.mean, vec![3.0]);
        assert_eq!(s.stddev, vec![STDDEV_FLOOR * 20.0]);
        assert_eq!(e.used(), 0);
    }

    #[test]
    fn init_two_members_sample_deviation() {
        let mut e = line_sphere(100);
        let c = Cluster::from_members(vec![Solution::new(vec![0.0], 0.0), Solution::new(vec![2.0], 4.0)]).unwrap();
        let s = init_from_cluster(&c, 2, &mut e, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(s.mean, vec![1.0]);
        assert!((s.stddev[0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(e.used(), 0);
        assert_eq!(s.multiplier, 1.0);
    }

    #[test]
    fn init_tops_up_population() {
        let mut e = line_sphere(100);
        let c = Cluster::from_members(vec![Solution::new(vec![0.0], 0.0), Solution::new(vec![2.0], 4.0)]).unwrap();
        let s = init_from_cluster(&c, 10, &mut e, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(s.population.len(), 10);
        assert_eq!(e.used(), 8);
    }

    #[test]
    fn collapsed_population_is_a_fixed_point() {
        let mut e = line_sphere(1000);
        let members = vec![Solution::new(vec![1.5], 2.25); 4];
        let c = Cluster::from_members(members).unwrap();
        let mut s = init_from_cluster(&c, 4, &mut e, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let best = s.best.clone();
        generation_step(&mut s, &mut e, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(s.mean, vec![1.5]);
        assert_eq!(s.stddev, vec![STDDEV_FLOOR * 20.0]);
        assert!(s.best.f <= best.f);
        assert!((s.best.x[0] - 1.5).abs() < 1e-12);
    }

    fn sphere_state(e: &mut BudgetedEvaluator, rng: &mut ChaCha8Rng) -> CoreSearchState {
        // Ten points drawn from N(5, 1) seed the search.
        let members: Vec<Solution> = (0..10)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                e.evaluate(vec![5.0 + z]).unwrap()
            })
            .collect();
        let mut s = init_from_cluster(&Cluster::from_members(members).unwrap(), 10, e, rng).unwrap();
        s.mean = vec![5.0];
        s.stddev = vec![1.0];
        s
    }

    #[test]
    fn sphere_converges_within_thirty_generations() {
        for seed in 0..20 {
            let mut e = line_sphere(100_000);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = sphere_state(&mut e, &mut rng);
            let mut last = s.best.f;
            for _ in 0..30 {
                generation_step(&mut s, &mut e, &mut rng).unwrap();
                assert!(s.best.f <= last);
                last = s.best.f;
            }
            assert!(s.best.f < 1e-6, "seed {seed}: {}", s.best.f);
        }
    }

    #[test]
    fn one_remaining_evaluation_then_exhausted() {
        let mut e = line_sphere(11);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut s = sphere_state(&mut e, &mut rng);
        assert_eq!(e.remaining(), 1);
        let err = generation_step(&mut s, &mut e, &mut rng).unwrap_err();
        assert!(matches!(err, EvalError::BudgetExhausted { .. }));
        assert_eq!(e.used(), 11);
        assert_eq!(s.population.len(), 2);
    }

    #[test]
    fn run_core_search_converges_on_sphere() {
        let mut e = line_sphere(100_000);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = sphere_state(&mut e, &mut rng);
        let out = run_from_state(s, &ElitistArchive::new(), &mut e, &mut rng, 100);
        assert_eq!(out.reason, TerminationReason::Converged);
        assert!(out.best.f < 1e-10);
    }

    #[test]
    fn run_core_search_without_budget() {
        let mut e = line_sphere(0);
        let c = Cluster::new(Solution::new(vec![1.0], 1.0));
        let out = run_core_search(&c, 10, &ElitistArchive::new(), &mut e, &mut ChaCha8Rng::seed_from_u64(0), 100);
        assert_eq!(out.reason, TerminationReason::BudgetExhausted);
        assert_eq!(out.generations, 0);
    }

    #[test]
    fn worked_rate_and_time_to_optimum() {
        let r = convergence_rate(1.0, 0.5, 5);
        assert!((r - 0.129_449_436_703_875_8).abs() < 1e-12);
        let tto = time_to_optimum_from_window(1.0, 0.5, 5);
        assert!((tto - 194.31).abs() < 0.01);
        assert!((time_to_optimum(0.5, r) - tto).abs() < 1e-9);
    }

    fn tracker_from(b: f64, values: &[f64]) -> ConvergenceTracker {
        let mut t = ConvergenceTracker::new(b);
        for v in values {
            t.record(*v);
        }
        t
    }

    #[test]
    fn terminator_fires_on_worked_example() {
        // Gaps 1.0 .. 0.5 geometrically over five generations.
        let gaps: Vec<f64> = (0..=5).map(|k| 0.5f64.powf(k as f64 / 5.0)).collect();
        let t = tracker_from(0.0, &gaps);
        assert!(check_convergence_termination(&t, 100, 4));
        assert!(!check_convergence_termination(&t, 100, 10));
    }

    #[test]
    fn negative_gap_suppresses() {
        let gaps = [1.0, 0.8, 0.6, 0.4, 0.2, -0.001];
        assert!(!check_convergence_termination(&tracker_from(0.0, &gaps), 100, 1));
    }

    #[test]
    fn worsening_gap_suppresses() {
        let gaps = [0.5, 0.52, 0.54, 0.56, 0.58, 0.6];
        let t = tracker_from(0.0, &gaps);
        assert!(t.rate().unwrap() < 0.0);
        assert!(!check_convergence_termination(&t, 100, 1));
    }

    #[test]
    fn non_consecutive_decrease_suppresses() {
        // Net decrease over the window but one uptick.
        let gaps = [1.0, 0.9, 0.95, 0.8, 0.7, 0.6];
        let t = tracker_from(0.0, &gaps);
        assert!(t.rate().unwrap() > 0.0);
        assert!(!check_convergence_termination(&t, 100, 1));
        let clean = tracker_from(0.0, &[1.0, 0.9, 0.85, 0.8, 0.7, 0.6]);
        assert!(check_convergence_termination(&clean, 100, 1));
    }

    #[test]
    fn tracker_keeps_window_plus_one() {
        let t = tracker_from(1.0, &[9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0]);
        assert_eq!(t.delta_window_start(), Some(6.0));
        assert_eq!(t.delta(), Some(1.0));
        assert_eq!(t.consecutive_improvements(), 7);
        assert!(!tracker_from(0.0, &[1.0, 0.5]).is_full());
    }
}
