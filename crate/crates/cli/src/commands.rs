//! The five harness commands. Each resolves its config section, runs the
//! experiment, writes its tables plus `config.resolved.toml` into the output
//! directory and returns the in-memory results.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use greedylr::noise::NoiseKind;
use greedylr::problems::Problem;
use greedylr::runner::{
    classify_paired, f_sweep, run_grid, run_on, summarize, theorem1_ladder, theorem2_sweep,
    ComparisonVerdict, Cutoff, FSweepRow, FactorResult, GridResult, PairKey, RunSummary,
    Theorem1Result, Trace, VerdictCounts,
};
use serde::{Deserialize, Serialize};

use crate::config::{
    ClassifySection, FSweepSection, Format, HarnessConfig, OutputSection, TheorySection,
};
use crate::output::{write_file, Table, Value};

pub const CONFIG_ECHO: &str = "config.resolved.toml";
pub const DEFAULT_OUT: &str = "out";

/// Settings shared by every command, after flags override the config.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub out: PathBuf,
    pub jobs: usize,
    /// Replaces the seed of `run`; offsets every seed list of the other commands.
    pub seed: Option<u64>,
    pub format: Format,
}

impl Options {
    pub fn resolve(
        cfg: &OutputSection,
        out: Option<PathBuf>,
        jobs: Option<usize>,
        seed: Option<u64>,
        format: Option<Format>,
    ) -> Result<Self> {
        let jobs = jobs.or(cfg.jobs).unwrap_or(1);
        if jobs == 0 {
            bail!("jobs must be at least 1");
        }
        Ok(Self {
            out: out
                .or_else(|| cfg.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            jobs,
            seed,
            format: format.unwrap_or(cfg.format),
        })
    }

    fn offset(&self, seeds: &[u64]) -> Vec<u64> {
        let d = self.seed.unwrap_or(0);
        seeds.iter().map(|s| s.wrapping_add(d)).collect()
    }

    /// Writes the config echo. Output location and thread count are left out
    /// so that the echo, like every other file, depends only on the inputs
    /// that shape results.
    fn echo(&self, cfg: HarnessConfig) -> Result<()> {
        let cfg = HarnessConfig {
            output: OutputSection {
                dir: None,
                format: self.format,
                jobs: None,
            },
            ..cfg
        };
        write_file(&self.out.join(CONFIG_ECHO), cfg.to_toml()?.as_bytes())
    }
}

/// One row per configured step. Steps after a divergence keep their step
/// number and leave the metric columns empty, so traces of one experiment
/// always align.
pub fn trace_table(trace: &Trace) -> Table {
    let mut t = Table::new(&["step", "true_loss", "observed_loss", "lr", "grad_norm"]);
    for k in 0..trace.total_steps.max(trace.len()) {
        let row = if k < trace.len() {
            vec![
                (k + 1).into(),
                trace.true_loss[k].into(),
                trace.observed_loss[k].into(),
                trace.lr[k].into(),
                trace.grad_norm[k].into(),
            ]
        } else {
            vec![
                (k + 1).into(),
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
            ]
        };
        t.push(row);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scheduler: String,
    pub factor: Option<f64>,
    pub problem: String,
    pub noise: NoiseKind,
    pub seed: u64,
    pub total_steps: usize,
    pub steps_recorded: usize,
    pub final_full_loss: f64,
    pub avg_iterate_full_loss: f64,
    #[serde(flatten)]
    pub summary: RunSummary,
}

/// `run`: one run, written as `trace.csv` and `summary.json`.
pub fn cmd_run(cfg: &HarnessConfig, opts: &Options) -> Result<RunReport> {
    let mut section = cfg
        .run
        .clone()
        .ok_or_else(|| anyhow!("config has no [run] section"))?;
    if let Some(seed) = opts.seed {
        section.seed = seed;
    }
    let rc = section.to_config()?;
    let problem = Problem::new(&rc.problem)?;
    let trace = run_on(&problem, &rc)?;
    let summary = summarize(&trace)?;
    trace_table(&trace).write(&opts.out, "trace", opts.format)?;
    let report = RunReport {
        scheduler: rc.scheduler.name().to_string(),
        factor: rc.scheduler.factor(),
        problem: rc.problem.label(),
        noise: rc.noise.kind,
        seed: rc.seed,
        total_steps: rc.total_steps,
        steps_recorded: trace.len(),
        final_full_loss: trace.final_full_loss,
        avg_iterate_full_loss: trace.avg_iterate_full_loss,
        summary,
    };
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    write_file(&opts.out.join("summary.json"), &json)?;
    opts.echo(HarnessConfig {
        run: Some(section.resolved()?),
        ..HarnessConfig::default()
    })?;
    Ok(report)
}

pub const RESULT_COLUMNS: [&str; 14] = [
    "run_id",
    "scheduler",
    "F",
    "problem",
    "noise",
    "seed",
    "stage10",
    "stage50",
    "stage100",
    "final_loss",
    "max_loss",
    "recovery_ratio",
    "recovery_speed",
    "diverged",
];

/// One row per run. A failed cell keeps its identity columns and leaves the
/// metric columns empty.
pub fn results_table(result: &GridResult) -> Table {
    let mut t = Table::new(&RESULT_COLUMNS);
    for r in &result.rows {
        let mut row: Vec<Value> = vec![
            r.run_id.into(),
            r.scheduler.as_str().into(),
            r.factor.into(),
            r.problem.as_str().into(),
            r.noise.to_string().into(),
            r.seed.into(),
        ];
        match r.summary() {
            Some(s) => row.extend([
                s.stage_losses[0].into(),
                s.stage_losses[1].into(),
                s.stage_losses[2].into(),
                s.final_loss.into(),
                s.max_loss.into(),
                s.recovery_ratio.into(),
                s.recovery_speed.into(),
                s.diverged.into(),
            ]),
            None => row.extend(std::iter::repeat_n(Value::Null, 8)),
        }
        t.push(row);
    }
    t
}

/// Median final loss, one row per scheduler and one column per noise kind.
pub fn medians_table(result: &GridResult) -> Table {
    let mut columns = vec!["scheduler".to_string()];
    columns.extend(result.noises.iter().map(|n| n.to_string()));
    let mut t = Table::new(&columns);
    let medians = result.median_table();
    for (si, s) in result.schedulers.iter().enumerate() {
        let mut row: Vec<Value> = vec![s.as_str().into()];
        row.extend((0..result.noises.len()).map(|ni| Value::from(medians[&(si, ni)])));
        t.push(row);
    }
    t
}

pub fn percentiles_table(result: &GridResult) -> Table {
    let mut t = Table::new(&[
        "scheduler",
        "n",
        "p10_final_loss",
        "p50_final_loss",
        "p90_final_loss",
        "range_ratio",
        "median_recovery_ratio",
        "max_recovery_ratio",
        "median_recovery_speed",
    ]);
    for s in &result.schedulers {
        let row = match result.stats(s, None) {
            Some(st) => vec![
                s.as_str().into(),
                st.runs.into(),
                st.p10_final_loss.into(),
                st.p50_final_loss.into(),
                st.p90_final_loss.into(),
                st.range_ratio.into(),
                st.median_recovery_ratio.into(),
                st.max_recovery_ratio.into(),
                st.median_recovery_speed.into(),
            ],
            None => {
                let mut row = vec![s.as_str().into(), 0usize.into()];
                row.extend(std::iter::repeat_n(Value::Null, 7));
                row
            }
        };
        t.push(row);
    }
    t
}

/// `robustness`: the scheduler × problem × noise × seed grid.
pub fn cmd_robustness(cfg: &HarnessConfig, opts: &Options) -> Result<GridResult> {
    let mut section = cfg.robustness.clone().unwrap_or_default();
    section.seeds = opts.offset(&section.seeds);
    let result = run_grid(&section.to_spec()?, opts.jobs)?;
    results_table(&result).write(&opts.out, "results", opts.format)?;
    medians_table(&result).write(&opts.out, "medians", opts.format)?;
    percentiles_table(&result).write(&opts.out, "percentiles", opts.format)?;
    opts.echo(HarnessConfig {
        robustness: Some(section.resolved()?),
        ..HarnessConfig::default()
    })?;
    Ok(result)
}

pub fn fsweep_table(rows: &[FSweepRow]) -> Table {
    let mut t = Table::new(&["F", "final_loss", "diverged", "diverged_runs", "runs"]);
    for r in rows {
        t.push(vec![
            r.factor.into(),
            r.final_loss.into(),
            r.diverged().into(),
            r.diverged_runs.into(),
            r.runs().into(),
        ]);
    }
    t
}

/// All seeds of one factor, stacked with a leading `seed` column.
pub fn fsweep_trace_table(row: &FSweepRow, seeds: &[u64]) -> Table {
    let mut t = Table::new(&[
        "seed",
        "step",
        "true_loss",
        "observed_loss",
        "lr",
        "grad_norm",
    ]);
    for (trace, &seed) in row.traces.iter().zip(seeds) {
        for mut r in trace_table(trace).rows {
            r.insert(0, seed.into());
            t.push(r);
        }
    }
    t
}

/// Directory holding the traces of factor `f`, relative to the output directory.
pub fn fsweep_dir(f: f64) -> String {
    format!("F{f}")
}

/// `fsweep`: GreedyLR at each scaling factor, all else paired.
pub fn cmd_fsweep(cfg: &HarnessConfig, opts: &Options) -> Result<Vec<FSweepRow>> {
    let mut section: FSweepSection = cfg.fsweep.clone().unwrap_or_default();
    section.seeds = opts.offset(&section.seeds);
    let base = section.to_config()?;
    let problem = Problem::new(&section.problem)?;
    let rows = f_sweep(
        &problem,
        &base,
        &section.noise,
        &section.factors,
        &section.seeds,
    )?;
    fsweep_table(&rows).write(&opts.out, "fsweep", opts.format)?;
    for r in &rows {
        fsweep_trace_table(r, &section.seeds).write(
            &opts.out.join(fsweep_dir(r.factor)),
            "trace",
            opts.format,
        )?;
    }
    opts.echo(HarnessConfig {
        fsweep: Some(section.resolved()?),
        ..HarnessConfig::default()
    })?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub l_max: f64,
    pub theorem1: Vec<Theorem1Result>,
    pub theorem2: Vec<FactorResult>,
}

pub fn theorem1_table(rows: &[Theorem1Result]) -> Table {
    let mut t = Table::new(&["T", "lhs", "rhs", "holds"]);
    for r in rows {
        t.push(vec![
            r.total_steps.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.holds.into(),
        ]);
    }
    t
}

pub fn theorem2_table(rows: &[FactorResult]) -> Table {
    let mut t = Table::new(&["F", "final_suboptimality", "optimal"]);
    for r in rows {
        t.push(vec![
            r.factor.into(),
            r.final_suboptimality.into(),
            r.is_optimal.into(),
        ]);
    }
    t
}

/// `theory`: the average-iterate bound over a horizon ladder and the
/// suboptimality of each scaling factor, including `1 − 1/L`.
pub fn cmd_theory(cfg: &HarnessConfig, opts: &Options) -> Result<TheoryReport> {
    let mut section: TheorySection = cfg.theory.clone().unwrap_or_default();
    section.seeds = opts.offset(&section.seeds);
    section.factor_seeds = opts.offset(&section.factor_seeds);
    let problem = Problem::new(&section.problem)?;
    let l_max = problem
        .l_max()
        .ok_or_else(|| anyhow!("theory needs a problem with a known smoothness constant"))?;
    let sched = section.scheduler(l_max);
    let theorem1 = theorem1_ladder(&problem, &sched, &section.ladder, &section.seeds)?;
    let theorem2 = theorem2_sweep(
        &problem,
        &sched,
        &section.factors,
        section.factor_steps,
        &section.factor_seeds,
    )?;
    theorem1_table(&theorem1).write(&opts.out, "theorem1", opts.format)?;
    theorem2_table(&theorem2).write(&opts.out, "theorem2", opts.format)?;
    opts.echo(HarnessConfig {
        theory: Some(section),
        ..HarnessConfig::default()
    })?;
    Ok(TheoryReport {
        l_max,
        theorem1,
        theorem2,
    })
}

/// One line of a `results.csv` file, as read back by `classify`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResultRecord {
    pub run_id: usize,
    pub scheduler: String,
    #[serde(rename = "F")]
    pub factor: Option<f64>,
    pub problem: String,
    pub noise: String,
    pub seed: u64,
    pub stage10: Option<f64>,
    pub stage50: Option<f64>,
    pub stage100: Option<f64>,
    pub final_loss: Option<f64>,
    pub max_loss: Option<f64>,
    pub recovery_ratio: Option<f64>,
    pub recovery_speed: Option<usize>,
    pub diverged: Option<bool>,
}

impl ResultRecord {
    pub fn key(&self) -> PairKey {
        PairKey {
            problem: self.problem.clone(),
            noise: self.noise.clone(),
            seed: self.seed,
        }
    }

    fn summary(&self) -> Result<RunSummary> {
        let need = |v: Option<f64>, col: &str| {
            v.ok_or_else(|| anyhow!("run {} has no {col} (the run failed)", self.run_id))
        };
        Ok(RunSummary {
            stage_losses: [
                need(self.stage10, "stage10")?,
                need(self.stage50, "stage50")?,
                need(self.stage100, "stage100")?,
            ],
            final_loss: need(self.final_loss, "final_loss")?,
            max_loss: need(self.max_loss, "max_loss")?,
            recovery_ratio: self.recovery_ratio,
            recovery_speed: self.recovery_speed,
            diverged: self.diverged.unwrap_or(false),
        })
    }
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    for col in RESULT_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            bail!("{}: missing column `{col}`", path.display());
        }
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.with_context(|| format!("{}: bad record {}", path.display(), i + 1)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub key: PairKey,
    pub greedy_scheduler: String,
    pub baseline_scheduler: String,
    pub verdict: ComparisonVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyReport {
    pub comparisons: Vec<Comparison>,
    pub counts: VerdictCounts,
}

fn index_rows<'a>(
    rows: &'a [ResultRecord],
    scheduler: &str,
    file: &str,
) -> Result<BTreeMap<PairKey, &'a ResultRecord>> {
    let mut out = BTreeMap::new();
    for r in rows.iter().filter(|r| r.scheduler == scheduler) {
        if out.insert(r.key(), r).is_some() {
            bail!(
                "{file}: duplicate run for scheduler {scheduler}, problem {}, noise {}, seed {}",
                r.problem,
                r.noise,
                r.seed
            );
        }
    }
    if out.is_empty() {
        bail!("{file}: no runs for scheduler {scheduler}");
    }
    Ok(out)
}

/// Pairs GreedyLR runs from `greedy_rows` with each baseline scheduler's
/// runs from `baseline_rows` on (problem, noise, seed) and classifies them.
pub fn classify_results(
    greedy_rows: &[ResultRecord],
    baseline_rows: &[ResultRecord],
    settings: &ClassifySection,
) -> Result<ClassifyReport> {
    let names_a: BTreeSet<&str> = greedy_rows.iter().map(|r| r.scheduler.as_str()).collect();
    let greedy = match &settings.greedy_scheduler {
        Some(g) => g.clone(),
        None if names_a.len() == 1 => names_a.iter().next().unwrap().to_string(),
        None if names_a.contains("greedy") => "greedy".to_string(),
        None => bail!("first input holds several schedulers; choose one with --greedy-scheduler"),
    };
    let baselines: Vec<String> = if settings.baseline_schedulers.is_empty() {
        let mut order: Vec<&str> = Vec::new();
        for r in baseline_rows {
            if !order.contains(&r.scheduler.as_str()) {
                order.push(&r.scheduler);
            }
        }
        let others: Vec<String> = order
            .iter()
            .filter(|s| **s != greedy)
            .map(|s| s.to_string())
            .collect();
        if others.is_empty() {
            order.iter().map(|s| s.to_string()).collect()
        } else {
            others
        }
    } else {
        settings.baseline_schedulers.clone()
    };
    if baselines.is_empty() {
        bail!("second input holds no runs");
    }
    let cutoff = if settings.relative {
        Cutoff::Relative(settings.cutoff)
    } else {
        Cutoff::Absolute(settings.cutoff)
    };

    let g_index = index_rows(greedy_rows, &greedy, "first input")?;
    let mut comparisons = Vec::new();
    let mut counts = VerdictCounts::default();
    for b in &baselines {
        let b_index = index_rows(baseline_rows, b, "second input")?;
        if let Some(k) = b_index.keys().find(|k| !g_index.contains_key(*k)) {
            bail!(
                "baseline {b} has a run for problem {}, noise {}, seed {} with no GreedyLR partner",
                k.problem,
                k.noise,
                k.seed
            );
        }
        for (key, g) in &g_index {
            let Some(base) = b_index.get(key) else {
                bail!(
                    "baseline {b} has no run for problem {}, noise {}, seed {}",
                    key.problem,
                    key.noise,
                    key.seed
                );
            };
            let verdict = classify_paired(
                (key, &g.summary()?),
                (&base.key(), &base.summary()?),
                cutoff,
            )?;
            counts.add(&verdict);
            comparisons.push(Comparison {
                key: key.clone(),
                greedy_scheduler: greedy.clone(),
                baseline_scheduler: b.clone(),
                verdict,
            });
        }
    }
    Ok(ClassifyReport {
        comparisons,
        counts,
    })
}

pub fn verdicts_table(comparisons: &[Comparison]) -> Table {
    let mut t = Table::new(&[
        "problem",
        "noise",
        "seed",
        "greedy_scheduler",
        "baseline_scheduler",
        "delta10",
        "verdict10",
        "delta50",
        "verdict50",
        "delta100",
        "verdict100",
        "overall_delta",
        "overall_verdict",
    ]);
    for c in comparisons {
        let mut row: Vec<Value> = vec![
            c.key.problem.as_str().into(),
            c.key.noise.as_str().into(),
            c.key.seed.into(),
            c.greedy_scheduler.as_str().into(),
            c.baseline_scheduler.as_str().into(),
        ];
        for s in c.verdict.stages.iter().chain([&c.verdict.overall]) {
            row.push(s.delta.into());
            row.push(s.verdict.to_string().into());
        }
        t.push(row);
    }
    t
}

pub fn counts_table(c: &VerdictCounts) -> Table {
    let mut t = Table::new(&[
        "pairs",
        "yes",
        "yes_star",
        "no",
        "no_star",
        "total",
        "as_good_or_better_pct",
        "better_pct",
        "as_good_pct",
        "worse_pct",
        "clearly_better_pct",
        "average_benefit",
        "max_benefit",
        "max_deficit",
        "final_within_cutoff",
        "stage10_as_good_or_better_pct",
        "stage50_as_good_or_better_pct",
        "stage100_as_good_or_better_pct",
    ]);
    let stage = c.stage_as_good_or_better_pct();
    t.push(vec![
        c.pairs.into(),
        c.yes.into(),
        c.yes_star.into(),
        c.no.into(),
        c.no_star.into(),
        c.total().into(),
        c.as_good_or_better_pct().into(),
        c.better_pct().into(),
        c.as_good_pct().into(),
        c.worse_pct().into(),
        c.clearly_better_pct().into(),
        c.average_benefit().into(),
        c.max_benefit().into(),
        c.max_deficit().into(),
        c.final_within_cutoff.into(),
        stage[0].into(),
        stage[1].into(),
        stage[2].into(),
    ]);
    t
}

/// `classify`: paired verdicts between two `results.csv` files.
pub fn cmd_classify(
    cfg: &HarnessConfig,
    greedy_path: &Path,
    baseline_path: &Path,
    opts: &Options,
) -> Result<ClassifyReport> {
    let settings = cfg.classify.clone().unwrap_or_default();
    if !(settings.cutoff >= 0.0 && settings.cutoff.is_finite()) {
        bail!(
            "cutoff must be finite and nonnegative, got {}",
            settings.cutoff
        );
    }
    let a = read_results(greedy_path)?;
    let b = read_results(baseline_path)?;
    let report = classify_results(&a, &b, &settings)?;
    verdicts_table(&report.comparisons).write(&opts.out, "verdicts", opts.format)?;
    counts_table(&report.counts).write(&opts.out, "summary_counts", opts.format)?;
    opts.echo(HarnessConfig {
        classify: Some(settings),
        ..HarnessConfig::default()
    })?;
    Ok(report)
}
