//! Objective functions, box bounds and budget-enforcing evaluation.
//!
//! Everything downstream of this module minimizes. Benchmarks that are
//! published as maximization problems declare [`Orientation::Maximize`] and
//! are negated exactly once, inside [`BudgetedEvaluator::evaluate`].

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Shared, thread-safe objective function in its published orientation.
pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Errors raised while evaluating candidate solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    /// The evaluation budget is spent. Recoverable: callers finalize and report.
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A budget ran out part-way through a batch; `partial` holds what was built.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation budget exhausted after partial progress")]
pub struct Exhausted<T> {
    pub partial: T,
}

/// Whether the published objective is maximized or minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Minimize,
    Maximize,
}

impl Orientation {
    /// Maps a published fitness value to the internal minimization scale.
    /// The map is an involution, so it also converts back.
    pub fn internal(self, published: f64) -> f64 {
        match self {
            Orientation::Minimize => published,
            Orientation::Maximize => -published,
        }
    }

    pub fn published(self, internal: f64) -> f64 {
        self.internal(internal)
    }
}

/// A candidate solution: parameter vector plus internal (minimization) fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub f: f64,
}

impl Solution {
    pub fn new(x: Vec<f64>, f: f64) -> Self {
        Self { x, f }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Full description of an optimization problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub id: u32,
    pub name: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub budget: u64,
    pub orientation: Orientation,
    pub num_global_optima: usize,
    /// Locations of the global optima, when known.
    pub known_optima: Vec<Vec<f64>>,
    /// Optimal fitness in the published orientation.
    pub optimum_fitness: f64,
    /// Matching radius used by scoring.
    pub niche_radius: f64,
    objective: Objective,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("budget", &self.budget)
            .field("orientation", &self.orientation)
            .field("num_global_optima", &self.num_global_optima)
            .field("optimum_fitness", &self.optimum_fitness)
            .field("niche_radius", &self.niche_radius)
            .finish_non_exhaustive()
    }
}

/// Reasons a [`ProblemSpec`] is rejected by [`ProblemSpec::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("bounds have mismatched lengths ({lower} vs {upper})")]
    BoundsLength { lower: usize, upper: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("lower bound {lower} is not below upper bound {upper} in dimension {dim}")]
    EmptyInterval { dim: usize, lower: f64, upper: f64 },
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("known optimum {index} lies outside the bounds")]
    OptimumOutOfBounds { index: usize },
    #[error("known optimum {index} evaluates to {found}, declared {declared}")]
    OptimumMismatch {
        index: usize,
        found: f64,
        declared: f64,
    },
}

impl ProblemSpec {
    /// A minimization problem without known optima, e.g. for synthetic landscapes.
    pub fn minimize<F>(name: impl Into<String>, lower: Vec<f64>, upper: Vec<f64>, budget: u64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            id: 0,
            name: name.into(),
            lower,
            upper,
            budget,
            orientation: Orientation::Minimize,
            num_global_optima: 1,
            known_optima: Vec::new(),
            optimum_fitness: f64::NAN,
            niche_radius: 0.0,
            objective: Arc::new(f),
        }
    }

    /// A published maximization problem, negated internally.
    pub fn maximize<F>(name: impl Into<String>, lower: Vec<f64>, upper: Vec<f64>, budget: u64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            orientation: Orientation::Maximize,
            ..Self::minimize(name, lower, upper, budget, f)
        }
    }

    pub fn with_id(mut self, id: u32) -> Self {
        self.id = id;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Declares the global optima (published orientation) and the scoring radius.
    pub fn with_optima(mut self, optima: Vec<Vec<f64>>, fitness: f64, niche_radius: f64) -> Self {
        self.num_global_optima = optima.len().max(1);
        self.known_optima = optima;
        self.optimum_fitness = fitness;
        self.niche_radius = niche_radius;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Evaluates the published objective without touching any budget.
    pub fn published_value(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    /// Evaluates the internal (minimization) objective without touching any budget.
    pub fn internal_value(&self, x: &[f64]) -> f64 {
        self.orientation.internal((self.objective)(x))
    }

    /// Product of the interval widths.
    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Clamps `x` coordinate-wise into the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Maps `x` into the unit cube.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    /// Euclidean distance in box-normalized coordinates.
    pub fn normalized_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((p, q), (lo, hi))| {
                let d = (p - q) / (hi - lo);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.lower.len() != self.upper.len() {
            return Err(SpecError::BoundsLength {
                lower: self.lower.len(),
                upper: self.upper.len(),
            });
        }
        if self.lower.is_empty() {
            return Err(SpecError::ZeroDimension);
        }
        for (dim, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo < hi) {
                return Err(SpecError::EmptyInterval {
                    dim,
                    lower: *lo,
                    upper: *hi,
                });
            }
        }
        if self.budget == 0 {
            return Err(SpecError::ZeroBudget);
        }
        for (index, opt) in self.known_optima.iter().enumerate() {
            if !self.contains(opt) {
                return Err(SpecError::OptimumOutOfBounds { index });
            }
            let found = self.published_value(opt);
            if (found - self.optimum_fitness).abs() > 1e-10 {
                return Err(SpecError::OptimumMismatch {
                    index,
                    found,
                    declared: self.optimum_fitness,
                });
            }
        }
        Ok(())
    }
}

/// Counts evaluations against a problem's budget.
#[derive(Debug, Clone)]
pub struct BudgetedEvaluator {
    spec: ProblemSpec,
    used: u64,
}

impl BudgetedEvaluator {
    pub fn new(spec: ProblemSpec) -> Self {
        Self { spec, used: 0 }
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.spec.budget - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.spec.budget
    }

    /// Evaluates `x`, returning a solution with internal fitness.
    pub fn evaluate(&mut self, x: Vec<f64>) -> Result<Solution, EvalError> {
        if x.len() != self.spec.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.spec.dim(),
                found: x.len(),
            });
        }
        if self.is_exhausted() {
            return Err(EvalError::BudgetExhausted {
                budget: self.spec.budget,
            });
        }
        self.used += 1;
        let f = self.spec.internal_value(&x);
        Ok(Solution { x, f })
    }

    /// Samples `n` points uniformly in the box and evaluates them in order.
    pub fn uniform_init<R: Rng + ?Sized>(
        &mut self,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<Solution>, Exhausted<Vec<Solution>>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let x: Vec<f64> = self
                .spec
                .lower
                .iter()
                .zip(&self.spec.upper)
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            match self.evaluate(x) {
                Ok(s) => out.push(s),
                Err(_) => return Err(Exhausted { partial: out }),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere(budget: u64) -> ProblemSpec {
        ProblemSpec::minimize("sphere", vec![-2.0, -2.0], vec![2.0, 2.0], budget, |x| {
            x.iter().map(|v| v * v).sum()
        })
    }

    #[test]
    fn evaluate_counts_and_exhausts() {
        let mut e = BudgetedEvaluator::new(sphere(2));
        assert_eq!(e.evaluate(vec![1.0, 1.0]).unwrap().f, 2.0);
        e.evaluate(vec![0.0, 0.0]).unwrap();
        assert_eq!(e.used(), 2);
        assert_eq!(
            e.evaluate(vec![0.0, 0.0]),
            Err(EvalError::BudgetExhausted { budget: 2 })
        );
        assert_eq!(e.used(), 2);
    }

    #[test]
    fn dimension_mismatch_does_not_consume_budget() {
        let mut e = BudgetedEvaluator::new(sphere(5));
        assert_eq!(
            e.evaluate(vec![1.0]),
            Err(EvalError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(e.used(), 0);
    }

    #[test]
    fn maximization_is_negated_once() {
        let spec = ProblemSpec::maximize("bump", vec![0.0], vec![1.0], 10, |x| 1.0 - x[0]);
        let mut e = BudgetedEvaluator::new(spec);
        let s = e.evaluate(vec![0.25]).unwrap();
        assert_eq!(s.f, -0.75);
        assert_eq!(e.spec().orientation.published(s.f), 0.75);
    }

    #[test]
    fn uniform_init_is_seeded_and_counted() {
        let mut e = BudgetedEvaluator::new(sphere(1000));
        let a = e.uniform_init(128, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a.len(), 128);
        assert_eq!(e.used(), 128);
        assert!(a.iter().all(|s| e.spec().contains(&s.x)));
        let b = e.uniform_init(128, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.x == q.x));
    }

    #[test]
    fn uniform_init_single_point_one_dimension() {
        let spec = ProblemSpec::minimize("line", vec![-1.0], vec![1.0], 5, |x| x[0]);
        let mut e = BudgetedEvaluator::new(spec);
        let pop = e.uniform_init(1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(pop.len(), 1);
        assert!(e.spec().contains(&pop[0].x));
    }

    #[test]
    fn uniform_init_returns_partial_sample() {
        let mut e = BudgetedEvaluator::new(sphere(10));
        let err = e
            .uniform_init(25, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap_err();
        assert_eq!(err.partial.len(), 10);
        assert_eq!(e.used(), 10);
    }

    #[test]
    fn validate_rejects_bad_specs() {
        let flat = ProblemSpec::minimize("flat", vec![1.0], vec![1.0], 5, |_| 0.0);
        assert!(matches!(flat.validate(), Err(SpecError::EmptyInterval { .. })));
        let wrong = sphere(5).with_optima(vec![vec![0.0, 0.0]], 1.0, 0.1);
        assert!(matches!(wrong.validate(), Err(SpecError::OptimumMismatch { .. })));
        let outside = sphere(5).with_optima(vec![vec![3.0, 0.0]], 9.0, 0.1);
        assert!(matches!(outside.validate(), Err(SpecError::OptimumOutOfBounds { .. })));
        assert!(sphere(5).with_optima(vec![vec![0.0, 0.0]], 0.0, 0.1).validate().is_ok());
    }

    #[test]
    fn clamp_repairs_into_box() {
        let spec = sphere(1);
        let mut x = vec![-5.0, 0.5];
        spec.clamp(&mut x);
        assert_eq!(x, vec![-2.0, 0.5]);
    }
}
