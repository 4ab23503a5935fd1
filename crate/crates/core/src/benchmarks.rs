//! The analytic CEC2013 niching problems (ids 1 to 10).
//!
//! All functions are stated in their published, maximizing orientation.
//! Ids 11 to 20 (the composition functions) keep catalog metadata so that
//! campaign reports can list them, but cannot be instantiated.

use std::f64::consts::PI;

use thiserror::Error;

use crate::problem::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("problem {0} unavailable: composition functions out of scope")]
    Unavailable(u32),
    #[error("unknown problem id {0} (valid ids are 1-20)")]
    Unknown(u32),
}

/// Table metadata for one problem of the suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogEntry {
    pub id: u32,
    pub name: &'static str,
    pub dim: usize,
    pub num_global_optima: usize,
    pub budget: u64,
    pub available: bool,
}

impl CatalogEntry {
    /// Budget rendered in thousands, e.g. `400K`.
    pub fn budget_label(&self) -> String {
        format!("{}K", self.budget / 1000)
    }
}

const fn entry(id: u32, name: &'static str, dim: usize, gopt: usize, budget: u64, available: bool) -> CatalogEntry {
    CatalogEntry {
        id,
        name,
        dim,
        num_global_optima: gopt,
        budget,
        available,
    }
}

pub const CATALOG: [CatalogEntry; 20] = [
    entry(1, "Five-Uneven-Peak Trap", 1, 2, 50_000, true),
    entry(2, "Equal Maxima", 1, 5, 50_000, true),
    entry(3, "Uneven Decreasing Maxima", 1, 1, 50_000, true),
    entry(4, "Himmelblau", 2, 4, 50_000, true),
    entry(5, "Six-Hump Camel Back", 2, 2, 50_000, true),
    entry(6, "Shubert", 2, 18, 200_000, true),
    entry(7, "Vincent", 2, 36, 200_000, true),
    entry(8, "Shubert", 3, 81, 400_000, true),
    entry(9, "Vincent", 3, 216, 400_000, true),
    entry(10, "Modified Rastrigin", 2, 12, 200_000, true),
    entry(11, "Composition Function 1", 2, 6, 200_000, false),
    entry(12, "Composition Function 2", 2, 8, 200_000, false),
    entry(13, "Composition Function 3", 2, 6, 200_000, false),
    entry(14, "Composition Function 3", 3, 6, 400_000, false),
    entry(15, "Composition Function 4", 3, 8, 400_000, false),
    entry(16, "Composition Function 3", 5, 6, 400_000, false),
    entry(17, "Composition Function 4", 5, 8, 400_000, false),
    entry(18, "Composition Function 3", 10, 6, 400_000, false),
    entry(19, "Composition Function 4", 10, 8, 400_000, false),
    entry(20, "Composition Function 4", 20, 8, 400_000, false),
];

pub fn catalog_entry(id: u32) -> Result<&'static CatalogEntry, CatalogError> {
    CATALOG
        .iter()
        .find(|e| e.id == id)
        .ok_or(CatalogError::Unknown(id))
}

/// Ids of all problems that can be instantiated.
pub fn available_ids() -> impl Iterator<Item = u32> {
    CATALOG.iter().filter(|e| e.available).map(|e| e.id)
}

// Published matching radii of the suite, indexed by id - 1.
const NICHE_RADII: [f64; 10] = [0.01, 0.01, 0.01, 0.01, 0.5, 0.5, 0.2, 0.5, 0.2, 0.01];

pub fn five_uneven_peak_trap(x: &[f64]) -> f64 {
    let x = x[0];
    match x {
        x if x < 2.5 => 80.0 * (2.5 - x),
        x if x < 5.0 => 64.0 * (x - 2.5),
        x if x < 7.5 => 64.0 * (7.5 - x),
        x if x < 12.5 => 28.0 * (x - 7.5),
        x if x < 17.5 => 28.0 * (17.5 - x),
        x if x < 22.5 => 32.0 * (x - 17.5),
        x if x < 27.5 => 32.0 * (27.5 - x),
        x => 80.0 * (x - 27.5),
    }
}

pub fn equal_maxima(x: &[f64]) -> f64 {
    (5.0 * PI * x[0]).sin().powi(6)
}

pub fn uneven_decreasing_maxima(x: &[f64]) -> f64 {
    let x = x[0];
    let envelope = (-2.0 * 2f64.ln() * ((x - 0.08) / 0.854).powi(2)).exp();
    envelope * (5.0 * PI * (x.powf(0.75) - 0.05)).sin().powi(6)
}

pub fn himmelblau(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    200.0 - (a * a + b - 11.0).powi(2) - (a + b * b - 7.0).powi(2)
}

pub fn six_hump_camel_back(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let a2 = a * a;
    let b2 = b * b;
    -((4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b + (4.0 * b2 - 4.0) * b2)
}

fn shubert_factor(v: f64) -> f64 {
    (1..=5)
        .map(|j| {
            let j = j as f64;
            j * ((j + 1.0) * v + j).cos()
        })
        .sum()
}

pub fn shubert(x: &[f64]) -> f64 {
    -x.iter().map(|&v| shubert_factor(v)).product::<f64>()
}

pub fn vincent(x: &[f64]) -> f64 {
    x.iter().map(|v| (10.0 * v.ln()).sin()).sum::<f64>() / x.len() as f64
}

pub fn modified_rastrigin(x: &[f64]) -> f64 {
    const K: [f64; 2] = [3.0, 4.0];
    -x.iter()
        .zip(K)
        .map(|(v, k)| 10.0 + 9.0 * (2.0 * PI * k * v).cos())
        .sum::<f64>()
}

// Maximizers and minimizers of the one-dimensional Shubert factor on [-10, 10].
const SHUBERT_MAX: [f64; 3] = [-7.083506403182753, -0.8003210949837175, 5.482864213124395];
const SHUBERT_MIN: [f64; 3] = [-7.708313746019706, -1.4251284197674918, 4.858056864406048];

fn shubert_optima(dim: usize) -> Vec<Vec<f64>> {
    // Global maxima of -prod(g) have exactly one coordinate at a minimizer of g
    // and all others at maximizers.
    let mut out = Vec::new();
    for neg in 0..dim {
        let mut partial: Vec<Vec<f64>> = vec![Vec::new()];
        for i in 0..dim {
            let choices = if i == neg { &SHUBERT_MIN } else { &SHUBERT_MAX };
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    choices.iter().map(move |c| {
                        let mut q = p.clone();
                        q.push(*c);
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

fn vincent_optima(dim: usize) -> Vec<Vec<f64>> {
    let coords: Vec<f64> = (-2..=3)
        .map(|k| ((PI / 2.0 + 2.0 * PI * k as f64) / 10.0).exp())
        .collect();
    cartesian(&vec![coords; dim])
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|p| {
                axis.iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(*c);
                    q
                })
            })
            .collect()
    })
}

fn half_min_pairwise(optima: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in optima.iter().enumerate() {
        for b in &optima[i + 1..] {
            let d = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            best = best.min(d);
        }
    }
    best / 2.0
}

/// Builds the problem with the given id.
pub fn get_problem(id: u32) -> Result<ProblemSpec, CatalogError> {
    let meta = catalog_entry(id)?;
    if !meta.available {
        return Err(CatalogError::Unavailable(id));
    }
    let (spec, optima, fitness) = match id {
        1 => (
            ProblemSpec::maximize(meta.name, vec![0.0], vec![30.0], meta.budget, five_uneven_peak_trap),
            vec![vec![0.0], vec![30.0]],
            200.0,
        ),
        2 => (
            ProblemSpec::maximize(meta.name, vec![0.0], vec![1.0], meta.budget, equal_maxima),
            [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|v| vec![*v]).collect(),
            1.0,
        ),
        3 => {
            let opt = vec![0.07969977945933969];
            let fitness = uneven_decreasing_maxima(&opt);
            (
                ProblemSpec::maximize(meta.name, vec![0.0], vec![1.0], meta.budget, uneven_decreasing_maxima),
                vec![opt],
                fitness,
            )
        }
        4 => (
            ProblemSpec::maximize(meta.name, vec![-6.0; 2], vec![6.0; 2], meta.budget, himmelblau),
            vec![
                vec![3.0, 2.0],
                vec![-2.805118069671833, 3.1313125311420045],
                vec![-3.779310261517667, -3.2831860042457475],
                vec![3.584428332850509, -1.8481264982567325],
            ],
            200.0,
        ),
        5 => (
            ProblemSpec::maximize(meta.name, vec![-1.9, -1.1], vec![1.9, 1.1], meta.budget, six_hump_camel_back),
            vec![
                vec![0.08984200893527233, -0.712656403019058],
                vec![-0.08984200893527233, 0.712656403019058],
            ],
            1.031628453489877,
        ),
        6 | 8 => {
            let d = meta.dim;
            let fitness = if d == 2 { 186.7309088310239 } else { 2709.09350557282 };
            (
                ProblemSpec::maximize(meta.name, vec![-10.0; d], vec![10.0; d], meta.budget, shubert),
                shubert_optima(d),
                fitness,
            )
        }
        7 | 9 => {
            let d = meta.dim;
            (
                ProblemSpec::maximize(meta.name, vec![0.25; d], vec![10.0; d], meta.budget, vincent),
                vincent_optima(d),
                1.0,
            )
        }
        10 => (
            ProblemSpec::maximize(meta.name, vec![0.0; 2], vec![1.0; 2], meta.budget, modified_rastrigin),
            cartesian(&[
                vec![1.0 / 6.0, 0.5, 5.0 / 6.0],
                vec![0.125, 0.375, 0.625, 0.875],
            ]),
            -2.0,
        ),
        _ => unreachable!("availability checked above"),
    };
    let radius = NICHE_RADII[id as usize - 1].min(half_min_pairwise(&optima));
    Ok(spec.with_id(id).with_optima(optima, fitness, radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_metadata() {
        let p2 = get_problem(2).unwrap();
        assert_eq!((p2.name.as_str(), p2.dim(), p2.num_global_optima, p2.budget), ("Equal Maxima", 1, 5, 50_000));
        let p7 = get_problem(7).unwrap();
        assert_eq!((p7.name.as_str(), p7.dim(), p7.num_global_optima, p7.budget), ("Vincent", 2, 36, 200_000));
        let p1 = get_problem(1).unwrap();
        assert_eq!((p1.dim(), p1.num_global_optima, p1.budget), (1, 2, 50_000));
        let p6 = get_problem(6).unwrap();
        assert_eq!((p6.dim(), p6.num_global_optima, p6.budget), (2, 18, 200_000));
        let p9 = get_problem(9).unwrap();
        assert_eq!((p9.dim(), p9.num_global_optima, p9.budget), (3, 216, 400_000));
    }

    #[test]
    fn composition_functions_unavailable() {
        assert_eq!(get_problem(11).unwrap_err(), CatalogError::Unavailable(11));
        assert_eq!(get_problem(20).unwrap_err(), CatalogError::Unavailable(20));
        assert_eq!(get_problem(0).unwrap_err(), CatalogError::Unknown(0));
        assert_eq!(get_problem(21).unwrap_err(), CatalogError::Unknown(21));
        assert_eq!(catalog_entry(14).unwrap().budget, 400_000);
    }

    #[test]
    fn every_available_problem_validates() {
        for id in available_ids() {
            let spec = get_problem(id).unwrap();
            spec.validate().unwrap_or_else(|e| panic!("problem {id}: {e}"));
            assert_eq!(spec.known_optima.len(), spec.num_global_optima, "problem {id}");
            assert_eq!(spec.num_global_optima, catalog_entry(id).unwrap().num_global_optima);
        }
    }

    #[test]
    fn equal_maxima_peak_is_minus_one_internally() {
        let spec = get_problem(2).unwrap();
        assert!((spec.internal_value(&[0.1]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn niche_radius_below_half_min_separation() {
        for id in available_ids() {
            let spec = get_problem(id).unwrap();
            assert!(spec.niche_radius > 0.0);
            assert!(spec.niche_radius <= half_min_pairwise(&spec.known_optima) + 1e-15);
        }
    }

    #[test]
    fn product_structure_counts() {
        assert_eq!(shubert_optima(2).len(), 18);
        assert_eq!(shubert_optima(3).len(), 81);
        assert_eq!(vincent_optima(2).len(), 36);
        assert_eq!(vincent_optima(3).len(), 216);
    }
}
