use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::summary::{median, percentile, summarize, RunSummary};
use super::{run_on, RunConfig};
use crate::error::{invalid, Error, Result};
use crate::noise::{NoiseKind, NoiseSpec};
use crate::optim::OptimizerKind;
use crate::problems::{Problem, ProblemSpec};
use crate::sched::{BaselineConfig, BaselineKind, GreedyConfig, Mode, SchedulerSpec};

/// GreedyLR settings with bounds expressed relative to each problem's
/// initial learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreedyTemplate {
    pub factor: f64,
    pub patience: usize,
    pub threshold: f64,
    pub cooldown: usize,
    pub warmup: usize,
    pub eps: f64,
    pub smoothing: bool,
    pub window_size: usize,
    pub reset_start: usize,
    pub min_lr_fraction: f64,
    pub max_lr_multiple: f64,
    /// Use the minimal two-branch form instead of the detailed controller.
    pub simple: bool,
}

impl Default for GreedyTemplate {
    fn default() -> Self {
        Self {
            factor: 0.95,
            patience: 10,
            threshold: 0.0,
            cooldown: 0,
            warmup: 0,
            eps: 1e-8,
            smoothing: true,
            window_size: 50,
            reset_start: 0,
            min_lr_fraction: 0.1,
            max_lr_multiple: 10.0,
            simple: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineTemplate {
    pub kind: BaselineKind,
    #[serde(default)]
    pub min_lr_fraction: f64,
    /// Defaults to a quarter of the run length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_period: Option<usize>,
    #[serde(default = "default_decay")]
    pub decay_rate: f64,
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default)]
    pub warmup_steps: usize,
}

fn default_decay() -> f64 {
    0.98
}

fn default_power() -> f64 {
    2.0
}

impl BaselineTemplate {
    pub fn new(kind: BaselineKind) -> Self {
        Self {
            kind,
            min_lr_fraction: 0.0,
            restart_period: None,
            decay_rate: default_decay(),
            power: default_power(),
            warmup_steps: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchedulerTemplate {
    Greedy(GreedyTemplate),
    Baseline(BaselineTemplate),
}

impl SchedulerTemplate {
    pub fn instantiate(&self, initial_lr: f64, total_steps: usize) -> SchedulerSpec {
        match self {
            SchedulerTemplate::Greedy(g) => {
                let cfg = GreedyConfig {
                    factor: g.factor,
                    patience: g.patience,
                    threshold: g.threshold,
                    cooldown: g.cooldown,
                    warmup: g.warmup,
                    min_lr: g.min_lr_fraction * initial_lr,
                    max_lr: g.max_lr_multiple * initial_lr,
                    eps: g.eps,
                    smoothing: g.smoothing,
                    window_size: g.window_size,
                    reset_start: g.reset_start,
                    mode: Mode::Min,
                    initial_lr,
                };
                if g.simple {
                    SchedulerSpec::GreedySimple(cfg)
                } else {
                    SchedulerSpec::Greedy(cfg)
                }
            }
            SchedulerTemplate::Baseline(b) => SchedulerSpec::Baseline(BaselineConfig {
                min_lr: b.min_lr_fraction * initial_lr,
                restart_period: b.restart_period.unwrap_or((total_steps / 4).max(1)),
                decay_rate: b.decay_rate,
                power: b.power,
                warmup_steps: b.warmup_steps,
                ..BaselineConfig::new(b.kind, initial_lr, total_steps)
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerTemplate::Greedy(g) if g.simple => "greedy_simple",
            SchedulerTemplate::Greedy(_) => "greedy",
            SchedulerTemplate::Baseline(b) => b.kind.name(),
        }
    }

    pub fn factor(&self) -> Option<f64> {
        match self {
            SchedulerTemplate::Greedy(g) => Some(g.factor),
            SchedulerTemplate::Baseline(_) => None,
        }
    }
}

/// A problem in the grid together with the initial learning rate every
/// scheduler starts from on it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProblem {
    pub name: String,
    pub spec: ProblemSpec,
    pub initial_lr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub problems: Vec<GridProblem>,
    pub schedulers: Vec<SchedulerTemplate>,
    pub noises: Vec<NoiseSpec>,
    pub seeds: Vec<u64>,
    pub total_steps: usize,
    pub optimizer: OptimizerKind,
}

impl GridSpec {
    pub fn n_cells(&self) -> usize {
        self.problems.len() * self.noises.len() * self.seeds.len() * self.schedulers.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells() == 0 {
            return invalid("grid must have at least one problem, scheduler, noise and seed");
        }
        let mut names: Vec<&str> = self.problems.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return invalid("grid problem names must be unique");
        }
        let mut kinds: Vec<NoiseKind> = Vec::new();
        for n in &self.noises {
            if kinds.contains(&n.kind) {
                return invalid(format!("noise kind {} listed twice", n.kind));
            }
            kinds.push(n.kind);
        }
        let mut scheds: Vec<&str> = self.schedulers.iter().map(|s| s.name()).collect();
        scheds.sort_unstable();
        if scheds.windows(2).any(|w| w[0] == w[1]) {
            return invalid("grid scheduler names must be unique");
        }
        for p in &self.problems {
            if !(p.initial_lr > 0.0 && p.initial_lr.is_finite()) {
                return invalid(format!("problem {}: initial_lr must be positive", p.name));
            }
        }
        Ok(())
    }
}

/// One executed grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub run_id: usize,
    pub scheduler: String,
    pub factor: Option<f64>,
    pub problem: String,
    pub noise: NoiseKind,
    pub seed: u64,
    pub outcome: std::result::Result<RunSummary, Error>,
}

impl GridRow {
    pub fn summary(&self) -> Option<&RunSummary> {
        self.outcome.as_ref().ok()
    }
}

/// Percentile statistics of final loss and recovery for one scheduler.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchedulerStats {
    pub scheduler: String,
    pub runs: usize,
    pub p10_final_loss: f64,
    pub p50_final_loss: f64,
    pub p90_final_loss: f64,
    /// `p90 / p10` of final loss.
    pub range_ratio: f64,
    pub median_recovery_ratio: Option<f64>,
    pub max_recovery_ratio: Option<f64>,
    pub median_recovery_speed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    pub schedulers: Vec<String>,
    pub noises: Vec<NoiseKind>,
}

impl GridResult {
    fn ok_rows<'a>(
        &'a self,
        scheduler: &'a str,
        noise: Option<&'a [NoiseKind]>,
    ) -> impl Iterator<Item = &'a RunSummary> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.scheduler == scheduler)
            .filter(move |r| noise.is_none_or(|ns| ns.contains(&r.noise)))
            .filter_map(GridRow::summary)
    }

    /// Median final loss per scheduler and noise kind, in grid order.
    pub fn median_table(&self) -> BTreeMap<(usize, usize), f64> {
        let mut out = BTreeMap::new();
        for (si, s) in self.schedulers.iter().enumerate() {
            for (ni, n) in self.noises.iter().enumerate() {
                let v: Vec<f64> = self
                    .ok_rows(s, Some(std::slice::from_ref(n)))
                    .map(|r| r.final_loss)
                    .collect();
                out.insert((si, ni), median(&v));
            }
        }
        out
    }

    /// Median final loss of `scheduler` over all cells.
    pub fn median_final_loss(&self, scheduler: &str) -> f64 {
        let v: Vec<f64> = self
            .ok_rows(scheduler, None)
            .map(|r| r.final_loss)
            .collect();
        median(&v)
    }

    /// Statistics for `scheduler`, optionally restricted to some noise kinds.
    pub fn stats(&self, scheduler: &str, noise: Option<&[NoiseKind]>) -> Option<SchedulerStats> {
        let runs: Vec<&RunSummary> = self.ok_rows(scheduler, noise).collect();
        if runs.is_empty() {
            return None;
        }
        let mut finals: Vec<f64> = runs.iter().map(|r| r.final_loss).collect();
        finals.sort_by(f64::total_cmp);
        let mut ratios: Vec<f64> = runs.iter().filter_map(|r| r.recovery_ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let speeds: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.recovery_speed.map(|s| s as f64))
            .collect();
        let p10 = percentile(&finals, 10.0);
        let p90 = percentile(&finals, 90.0);
        Some(SchedulerStats {
            scheduler: scheduler.to_string(),
            runs: runs.len(),
            p10_final_loss: p10,
            p50_final_loss: percentile(&finals, 50.0),
            p90_final_loss: p90,
            range_ratio: p90 / p10,
            median_recovery_ratio: (!ratios.is_empty()).then(|| percentile(&ratios, 50.0)),
            max_recovery_ratio: ratios.last().copied(),
            median_recovery_speed: (!speeds.is_empty()).then(|| median(&speeds)),
        })
    }
}

struct Cell {
    problem: usize,
    noise: usize,
    seed: u64,
    scheduler: usize,
}

/// Runs every cell of `spec` on `jobs` worker threads.
///
/// Cells are ordered problem, noise, seed, scheduler and numbered in that
/// order; the result is identical for any `jobs`. A cell whose run fails is
/// recorded with its error and the remaining cells still run.
pub fn run_grid(spec: &GridSpec, jobs: usize) -> Result<GridResult> {
    spec.validate()?;
    let problems: Vec<std::result::Result<Problem, Error>> = spec
        .problems
        .iter()
        .map(|p| Problem::new(&p.spec))
        .collect();

    let mut cells = Vec::with_capacity(spec.n_cells());
    for problem in 0..spec.problems.len() {
        for noise in 0..spec.noises.len() {
            for &seed in &spec.seeds {
                for scheduler in 0..spec.schedulers.len() {
                    cells.push(Cell {
                        problem,
                        noise,
                        seed,
                        scheduler,
                    });
                }
            }
        }
    }

    let run_cell = |(run_id, cell): (usize, &Cell)| -> GridRow {
        let gp = &spec.problems[cell.problem];
        let tmpl = &spec.schedulers[cell.scheduler];
        let noise = &spec.noises[cell.noise];
        let outcome = problems[cell.problem].clone().and_then(|problem| {
            let cfg = RunConfig {
                optimizer: spec.optimizer,
                noise: noise.clone(),
                total_steps: spec.total_steps,
                seed: cell.seed,
                ..RunConfig::new(
                    gp.spec.clone(),
                    tmpl.instantiate(gp.initial_lr, spec.total_steps),
                )
            };
            cfg.scheduler.validate()?;
            summarize(&run_on(&problem, &cfg)?)
        });
        GridRow {
            run_id,
            scheduler: tmpl.name().to_string(),
            factor: tmpl.factor(),
            problem: gp.name.clone(),
            noise: noise.kind,
            seed: cell.seed,
            outcome,
        }
    };

    let rows: Vec<GridRow> = if jobs <= 1 {
        cells.iter().enumerate().map(run_cell).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| cells.par_iter().enumerate().map(run_cell).collect())
    };

    Ok(GridResult {
        rows,
        schedulers: spec
            .schedulers
            .iter()
            .map(|s| s.name().to_string())
            .collect(),
        noises: spec.noises.iter().map(|n| n.kind).collect(),
    })
}
