//! Seeded benchmark campaigns: the logic behind the `list`, `run` and
//! `score` subcommands of the `hillvallea` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::benchmarks::{catalog_entry, get_problem, CatalogError, CATALOG};
use crate::orchestrator::{run_hillvallea, ReportParseError, RunReport};
use crate::scoring::{aggregate, score_with, Score, Summary, DEFAULT_EPSILON};

pub const CSV_HEADER: &str = "problem,seed,evals,peaks_found,peak_ratio,static_f1,f1_harmonic";
pub const DEFAULT_RUNS: usize = 50;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ReportParseError,
    },
    #[error("report is for problem {found}, expected problem {expected}")]
    ProblemMismatch { expected: u32, found: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub problems: Vec<u32>,
    pub runs: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    pub out: Option<PathBuf>,
    /// Directory receiving one run report per (problem, seed), if set.
    pub reports_dir: Option<PathBuf>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            problems: (1..=10).collect(),
            runs: DEFAULT_RUNS,
            base_seed: 0,
            epsilon: DEFAULT_EPSILON,
            out: None,
            reports_dir: None,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.runs == 0 {
            return Err(CampaignError::Config("runs must be at least 1".into()));
        }
        if !(self.epsilon >= DEFAULT_EPSILON) {
            return Err(CampaignError::Config(format!(
                "epsilon must be at least {DEFAULT_EPSILON:e}, got {}",
                self.epsilon
            )));
        }
        if self.problems.is_empty() {
            return Err(CampaignError::Config("no problems selected".into()));
        }
        for &id in &self.problems {
            if !catalog_entry(id)?.available {
                return Err(CatalogError::Unavailable(id).into());
            }
        }
        Ok(())
    }
}

/// Parses problem selections such as `1-10`, `4`, or `1-5,8,10`.
pub fn parse_problem_list(text: &str) -> Result<Vec<u32>, CampaignError> {
    let bad = || CampaignError::Config(format!("cannot parse problem list `{text}`"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// One line per catalog entry, optionally restricted to `filter`.
pub fn cmd_list(filter: &[u32]) -> Vec<String> {
    CATALOG
        .iter()
        .filter(|e| filter.is_empty() || filter.contains(&e.id))
        .map(|e| {
            format!(
                "{} | {} | {} | {} | {} | {}",
                e.id,
                e.name,
                e.dim,
                e.num_global_optima,
                e.budget_label(),
                if e.available { "available" } else { "unavailable" }
            )
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub problem: u32,
    pub seed: u64,
    pub report: RunReport,
    pub score: Score,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<(u32, Summary)>,
}

impl CampaignResult {
    pub fn summary(&self, problem: u32) -> Option<&Summary> {
        self.summaries.iter().find(|(p, _)| *p == problem).map(|(_, s)| s)
    }

    /// The campaign as CSV: per-run rows, each problem followed by its mean row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for (problem, summary) in &self.summaries {
            for r in self.records.iter().filter(|r| r.problem == *problem) {
                writeln!(
                    out,
                    "{},{},{},{},{:.6},{:.6},{:.6}",
                    r.problem,
                    r.seed,
                    r.score.evaluations_used,
                    r.score.peaks_found,
                    r.score.peak_ratio,
                    r.score.static_f1,
                    r.score.f1_harmonic
                )
                .unwrap();
            }
            writeln!(
                out,
                "{},mean,{:.1},{:.3},{:.6},{:.6},{:.6}",
                problem,
                summary.mean_evaluations,
                summary.mean_peaks_found,
                summary.mean_peak_ratio,
                summary.mean_static_f1,
                summary.mean_f1_harmonic
            )
            .unwrap();
        }
        out
    }
}

/// Runs `config.runs` seeded runs of every selected problem and scores them.
///
/// Runs execute in parallel; records are ordered by (problem, seed) so the
/// output never depends on scheduling.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResult, CampaignError> {
    config.validate()?;
    let specs = config
        .problems
        .iter()
        .map(|&id| get_problem(id))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, u64)> = (0..specs.len())
        .flat_map(|p| (0..config.runs as u64).map(move |i| (p, config.base_seed.wrapping_add(i))))
        .collect();
    let mut records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(p, seed)| {
            let spec = &specs[p];
            let report = run_hillvallea(spec, seed);
            let mut score = score_with(&report.solutions, spec, config.epsilon, spec.niche_radius);
            score.evaluations_used = report.evaluations;
            RunRecord {
                problem: spec.id,
                seed,
                report,
                score,
            }
        })
        .collect();
    records.sort_by_key(|r| (r.problem, r.seed));

    let summaries = specs
        .iter()
        .map(|spec| {
            let scores: Vec<Score> = records.iter().filter(|r| r.problem == spec.id).map(|r| r.score).collect();
            (spec.id, aggregate(&scores).expect("runs >= 1"))
        })
        .collect();
    Ok(CampaignResult { records, summaries })
}

/// Runs a campaign and writes its CSV (and optional run reports) to disk.
pub fn cmd_run(config: &CampaignConfig) -> Result<CampaignResult, CampaignError> {
    let result = run_campaign(config)?;
    if let Some(dir) = &config.reports_dir {
        fs::create_dir_all(dir).map_err(|source| CampaignError::Io {
            path: dir.clone(),
            source,
        })?;
        for r in &result.records {
            let path = dir.join(format!("p{:02}_s{}.txt", r.problem, r.seed));
            fs::write(&path, r.report.to_string()).map_err(|source| CampaignError::Io { path, source })?;
        }
    }
    if let Some(path) = &config.out {
        fs::write(path, result.to_csv()).map_err(|source| CampaignError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(result)
}

/// Re-scores a stored run report against problem `id`.
pub fn cmd_score(path: &Path, id: u32, epsilon: f64) -> Result<Score, CampaignError> {
    let spec = get_problem(id)?;
    let text = fs::read_to_string(path).map_err(|source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let report = RunReport::parse(&text, spec.dim()).map_err(|source| CampaignError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    if report.problem_id != 0 && report.problem_id != id {
        return Err(CampaignError::ProblemMismatch {
            expected: id,
            found: report.problem_id,
        });
    }
    let mut score = score_with(&report.solutions, &spec, epsilon, spec.niche_radius);
    score.evaluations_used = report.evaluations;
    Ok(score)
}
