//! Peak ratio and static F1 of a reported solution set.

use crate::problem::{ProblemSpec, Solution};

/// Default fitness accuracy for counting a peak as found.
pub const DEFAULT_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub peaks_found: usize,
    pub peak_ratio: f64,
    /// Fraction of reported solutions that are distinct global optima.
    pub static_f1: f64,
    /// Harmonic mean of peak ratio and `static_f1`.
    pub f1_harmonic: f64,
    pub evaluations_used: u64,
}

/// Scores `reported` (published-orientation fitness) at the default accuracy.
pub fn score(reported: &[Solution], spec: &ProblemSpec) -> Score {
    score_with(reported, spec, DEFAULT_EPSILON, spec.niche_radius)
}

/// Scores with an explicit fitness accuracy and matching radius.
///
/// Solutions within `epsilon` of the optimal fitness are considered in order
/// of increasing fitness error; each claims the nearest unclaimed known
/// optimum within `radius`.
pub fn score_with(reported: &[Solution], spec: &ProblemSpec, epsilon: f64, radius: f64) -> Score {
    let mut candidates: Vec<(f64, &Solution)> = reported
        .iter()
        .map(|s| ((s.f - spec.optimum_fitness).abs(), s))
        .filter(|(err, _)| *err <= epsilon)
        .collect();
    // Total order so that the result does not depend on input order.
    candidates.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then_with(|| {
            a.1.x
                .iter()
                .zip(&b.1.x)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    let mut claimed = vec![false; spec.known_optima.len()];
    let mut matched = 0;
    for (_, s) in candidates {
        let nearest = spec
            .known_optima
            .iter()
            .enumerate()
            .filter(|(i, _)| !claimed[*i])
            .map(|(i, opt)| (euclid(&s.x, opt), i))
            .filter(|(d, _)| *d <= radius)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, i)) = nearest {
            claimed[i] = true;
            matched += 1;
        }
    }

    let peak_ratio = matched as f64 / spec.num_global_optima as f64;
    let static_f1 = if reported.is_empty() {
        if spec.num_global_optima == 0 { 1.0 } else { 0.0 }
    } else {
        matched as f64 / reported.len() as f64
    };
    let f1_harmonic = if peak_ratio + static_f1 > 0.0 {
        2.0 * peak_ratio * static_f1 / (peak_ratio + static_f1)
    } else {
        0.0
    };
    Score {
        peaks_found: matched,
        peak_ratio,
        static_f1,
        f1_harmonic,
        evaluations_used: 0,
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
}

/// Averages over repeated runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub mean_peaks_found: f64,
    pub mean_peak_ratio: f64,
    pub min_peak_ratio: f64,
    pub max_peak_ratio: f64,
    pub mean_static_f1: f64,
    pub min_static_f1: f64,
    pub max_static_f1: f64,
    pub mean_f1_harmonic: f64,
    pub mean_evaluations: f64,
    pub max_evaluations: u64,
}

/// Summarizes a non-empty set of scores; `None` when `scores` is empty.
pub fn aggregate(scores: &[Score]) -> Option<Summary> {
    if scores.is_empty() {
        return None;
    }
    let n = scores.len() as f64;
    let mean = |f: fn(&Score) -> f64| scores.iter().map(f).sum::<f64>() / n;
    let min = |f: fn(&Score) -> f64| scores.iter().map(f).fold(f64::INFINITY, f64::min);
    let max = |f: fn(&Score) -> f64| scores.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Some(Summary {
        runs: scores.len(),
        mean_peaks_found: mean(|s| s.peaks_found as f64),
        mean_peak_ratio: mean(|s| s.peak_ratio),
        min_peak_ratio: min(|s| s.peak_ratio),
        max_peak_ratio: max(|s| s.peak_ratio),
        mean_static_f1: mean(|s| s.static_f1),
        min_static_f1: min(|s| s.static_f1),
        max_static_f1: max(|s| s.static_f1),
        mean_f1_harmonic: mean(|s| s.f1_harmonic),
        mean_evaluations: mean(|s| s.evaluations_used as f64),
        max_evaluations: scores.iter().map(|s| s.evaluations_used).max().unwrap_or(0),
    })
}
