//! Hill-valley test and hill-valley clustering.
//!
//! Two solutions share a niche when no point sampled on the segment between
//! them is worse than both endpoints. Clustering applies the test along
//! nearest-better edges of a fitness-sorted population. Test points that
//! pass are kept and handed to the cluster their origin solution joins.

use crate::problem::{BudgetedEvaluator, EvalError, Exhausted, Solution};

/// Upper bound on test points sampled per clustering edge.
pub const MAX_TEST_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct HillValleyOutcome {
    pub same_niche: bool,
    /// Every sampled test point, minus the violator on rejection.
    pub accepted_tests: Vec<Solution>,
    pub violator: Option<Solution>,
}

/// Tests whether `a` and `b` lie in the same valley.
///
/// Test points are sampled at `a + k/(n_test+1) (b - a)` for `k = 1..=n_test`,
/// starting next to `a`, and evaluation stops at the first point whose fitness
/// exceeds both endpoints.
pub fn hill_valley_test(
    a: &Solution,
    b: &Solution,
    n_test: usize,
    e: &mut BudgetedEvaluator,
) -> Result<HillValleyOutcome, EvalError> {
    let mut outcome = HillValleyOutcome {
        same_niche: true,
        accepted_tests: Vec::new(),
        violator: None,
    };
    if a.x == b.x {
        return Ok(outcome);
    }
    let worst = a.f.max(b.f);
    for k in 1..=n_test {
        let t = k as f64 / (n_test + 1) as f64;
        let x = a.x.iter().zip(&b.x).map(|(p, q)| p + t * (q - p)).collect();
        let s = e.evaluate(x)?;
        if s.f > worst {
            outcome.same_niche = false;
            outcome.violator = Some(s);
            return Ok(outcome);
        }
        outcome.accepted_tests.push(s);
    }
    Ok(outcome)
}

/// Solutions believed to occupy one valley.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<Solution>,
    best: usize,
}

impl Cluster {
    pub fn new(first: Solution) -> Self {
        Self {
            members: vec![first],
            best: 0,
        }
    }

    pub fn from_members(members: Vec<Solution>) -> Option<Self> {
        let mut iter = members.into_iter();
        let mut c = Cluster::new(iter.next()?);
        for s in iter {
            c.push(s);
        }
        Some(c)
    }

    pub fn push(&mut self, s: Solution) {
        if s.f < self.members[self.best].f {
            self.best = self.members.len();
        }
        self.members.push(s);
    }

    pub fn best(&self) -> &Solution {
        &self.members[self.best]
    }

    pub fn best_index(&self) -> usize {
        self.best
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Number of test points for a clustering edge of normalized length `dist`,
/// given the normalized expected edge length of the population.
pub fn test_points_for_edge(dist: f64, edge_length: f64) -> usize {
    let extra = (dist / edge_length).floor();
    if extra.is_finite() && extra < MAX_TEST_POINTS as f64 {
        1 + extra as usize
    } else {
        MAX_TEST_POINTS
    }
}

/// Partitions `pop` into hill-valley clusters.
///
/// On budget exhaustion the clusters built so far are returned inside the
/// error; solutions not yet processed are left out.
pub fn cluster_population(
    pop: &[Solution],
    e: &mut BudgetedEvaluator,
) -> Result<Vec<Cluster>, Exhausted<Vec<Cluster>>> {
    if pop.is_empty() {
        return Ok(Vec::new());
    }
    let spec = e.spec().clone();
    let d = spec.dim();

    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&i, &j| pop[i].f.total_cmp(&pop[j].f));
    let sorted: Vec<&Solution> = order.iter().map(|&i| &pop[i]).collect();
    let normalized: Vec<Vec<f64>> = sorted.iter().map(|s| spec.normalize(&s.x)).collect();

    // Expected edge length of a uniform sample in the unit cube.
    let edge_length = (1.0 / pop.len() as f64).powf(1.0 / d as f64);
    let max_attempts = 1 + d;

    let mut clusters = vec![Cluster::new(sorted[0].clone())];
    let mut label = vec![0usize; sorted.len()];

    for i in 1..sorted.len() {
        // Scanning better solutions by distance and skipping clusters already
        // tested visits exactly the nearest member of each cluster, in order.
        let mut nearest_in_cluster = vec![(f64::INFINITY, usize::MAX); clusters.len()];
        for j in 0..i {
            let dist = euclid(&normalized[i], &normalized[j]);
            let slot = &mut nearest_in_cluster[label[j]];
            if dist < slot.0 {
                *slot = (dist, j);
            }
        }
        let mut candidates: Vec<(f64, usize)> = nearest_in_cluster
            .into_iter()
            .filter(|(_, j)| *j != usize::MAX)
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        candidates.truncate(max_attempts);

        let mut pending: Vec<Solution> = Vec::new();
        let mut joined = None;

        for (dist, j) in candidates {
            let target = label[j];
            let n_test = test_points_for_edge(dist, edge_length);
            match hill_valley_test(sorted[i], sorted[j], n_test, e) {
                Ok(outcome) => {
                    pending.extend(outcome.accepted_tests);
                    if outcome.same_niche {
                        joined = Some(target);
                        break;
                    }
                }
                Err(_) => return Err(Exhausted { partial: clusters }),
            }
        }

        let target = joined.unwrap_or_else(|| {
            clusters.push(Cluster::new(sorted[i].clone()));
            clusters.len() - 1
        });
        if joined.is_some() {
            clusters[target].push(sorted[i].clone());
        }
        for s in pending {
            clusters[target].push(s);
        }
        label[i] = target;
    }
    Ok(clusters)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
}
