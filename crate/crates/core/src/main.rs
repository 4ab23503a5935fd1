use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hillvallea::campaign::{self, CampaignConfig, DEFAULT_RUNS};
use hillvallea::scoring::DEFAULT_EPSILON;

#[derive(Parser)]
#[command(name = "hillvallea", version, about = "Seeded niching benchmark campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the benchmark catalog
    List {
        #[arg(long)]
        problems: Option<String>,
    },
    /// Run a campaign and write a CSV of per-run and mean scores
    Run {
        #[arg(long, default_value = "1-10")]
        problems: String,
        #[arg(long, default_value_t = DEFAULT_RUNS)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// CSV destination; printed to stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-run report files
        #[arg(long)]
        reports: Option<PathBuf>,
    },
    /// Score a stored run report
    Score {
        report: PathBuf,
        #[arg(long)]
        problem: u32,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), campaign::CampaignError> {
    match cli.command {
        Command::List { problems } => {
            let filter = problems.as_deref().map(campaign::parse_problem_list).transpose()?;
            for line in campaign::cmd_list(filter.as_deref().unwrap_or_default()) {
                println!("{line}");
            }
        }
        Command::Run {
            problems,
            runs,
            seed,
            epsilon,
            out,
            reports,
        } => {
            let config = CampaignConfig {
                problems: campaign::parse_problem_list(&problems)?,
                runs,
                base_seed: seed,
                epsilon,
                out: out.clone(),
                reports_dir: reports,
            };
            let result = campaign::cmd_run(&config)?;
            if out.is_none() {
                print!("{}", result.to_csv());
            } else {
                for (id, s) in &result.summaries {
                    eprintln!(
                        "problem {id:>2}: PR {:.3}  static F1 {:.3}  evals {:.0}",
                        s.mean_peak_ratio, s.mean_static_f1, s.mean_evaluations
                    );
                }
            }
        }
        Command::Score {
            report,
            problem,
            epsilon,
        } => {
            let s = campaign::cmd_score(&report, problem, epsilon)?;
            println!("peaks_found {}", s.peaks_found);
            println!("peak_ratio {:.6}", s.peak_ratio);
            println!("static_f1 {:.6}", s.static_f1);
            println!("f1_harmonic {:.6}", s.f1_harmonic);
        }
    }
    Ok(())
}
