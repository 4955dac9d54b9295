//! Command-line harness for the `greedylr` crate: TOML configuration,
//! experiment commands and byte-stable CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::Options;
use crate::config::{Format, HarnessConfig};

#[derive(Debug, Parser)]
#[command(name = "greedylr", version, about = "GreedyLR scheduler experiments")]
pub struct Cli {
    /// TOML config file; built-in defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (default: `out`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for grid commands.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Seed for `run`; offset added to every seed list elsewhere.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// A single run: trace and summary.
    Run,
    /// The scheduler × problem × noise × seed grid.
    Robustness,
    /// GreedyLR across scaling factors.
    Fsweep,
    /// Convergence-bound and optimal-factor checks on a quadratic.
    Theory,
    /// Paired verdicts between two results files.
    Classify {
        /// `results.csv` holding the GreedyLR runs.
        greedy: PathBuf,
        /// `results.csv` holding the baseline runs.
        baseline: PathBuf,
        #[arg(long, value_name = "NAME")]
        greedy_scheduler: Option<String>,
        /// Comma-separated baseline scheduler names.
        #[arg(long, value_name = "NAMES", value_delimiter = ',')]
        baseline_scheduler: Vec<String>,
        #[arg(long)]
        cutoff: Option<f64>,
        /// Scale the cutoff by the GreedyLR loss.
        #[arg(long)]
        relative: bool,
    },
}

/// Runs the parsed command line and returns the lines to print.
pub fn execute(cli: Cli) -> Result<Vec<String>> {
    let mut cfg = match &cli.config {
        Some(path) => HarnessConfig::load(path)?,
        None => HarnessConfig::default(),
    };
    let opts = Options::resolve(&cfg.output, cli.out, cli.jobs, cli.seed, cli.format)?;
    let mut lines = Vec::new();
    match cli.command {
        Command::Run => {
            if cfg.run.is_none() {
                anyhow::bail!("`run` needs a config file with a [run] section");
            }
            let r = commands::cmd_run(&cfg, &opts)?;
            lines.push(format!(
                "{} on {}: final_loss {} over {} steps{}",
                r.scheduler,
                r.problem,
                r.summary.final_loss,
                r.steps_recorded,
                if r.summary.diverged {
                    " (diverged)"
                } else {
                    ""
                }
            ));
        }
        Command::Robustness => {
            let result = commands::cmd_robustness(&cfg, &opts)?;
            let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
            lines.push(format!("{} runs, {failed} failed", result.rows.len()));
            for s in &result.schedulers {
                lines.push(format!(
                    "{s}: median final loss {}",
                    result.median_final_loss(s)
                ));
            }
        }
        Command::Fsweep => {
            for r in commands::cmd_fsweep(&cfg, &opts)? {
                lines.push(format!(
                    "F={}: median final loss {}, diverged {}/{}",
                    r.factor,
                    r.final_loss,
                    r.diverged_runs,
                    r.runs()
                ));
            }
        }
        Command::Theory => {
            let report = commands::cmd_theory(&cfg, &opts)?;
            for r in &report.theorem1 {
                lines.push(format!(
                    "T={}: lhs {} rhs {} holds {}",
                    r.total_steps, r.lhs, r.rhs, r.holds
                ));
            }
            for r in &report.theorem2 {
                let mark = if r.is_optimal { " (1 - 1/L)" } else { "" };
                lines.push(format!(
                    "F={}{mark}: suboptimality {}",
                    r.factor, r.final_suboptimality
                ));
            }
        }
        Command::Classify {
            greedy,
            baseline,
            greedy_scheduler,
            baseline_scheduler,
            cutoff,
            relative,
        } => {
            let section = cfg.classify.get_or_insert_with(Default::default);
            if greedy_scheduler.is_some() {
                section.greedy_scheduler = greedy_scheduler;
            }
            if !baseline_scheduler.is_empty() {
                section.baseline_schedulers = baseline_scheduler;
            }
            if let Some(c) = cutoff {
                section.cutoff = c;
            }
            section.relative |= relative;
            let report = commands::cmd_classify(&cfg, &greedy, &baseline, &opts)?;
            let c = &report.counts;
            lines.push(format!(
                "{} pairs: yes {}, yes* {}, no {}, no* {}; as good or better {}%",
                c.pairs,
                c.yes,
                c.yes_star,
                c.no,
                c.no_star,
                c.as_good_or_better_pct()
            ));
        }
    }
    lines.push(format!("wrote {}", opts.out.display()));
    Ok(lines)
}
