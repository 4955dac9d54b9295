//! Experiments that check the convergence bound for the average iterate and
//! the optimal scaling factor on problems with known smoothness, plus the
//! scaling-factor sweep.

use serde::Serialize;

use super::summary::{median, summarize, RunSummary};
use super::{run_on, RunConfig, Trace};
use crate::error::{invalid, Error, Result};
use crate::noise::NoiseSpec;
use crate::problems::Problem;
use crate::sched::SchedulerSpec;

/// Returns `spec` with its GreedyLR factor replaced by `factor`.
pub fn with_factor(spec: &SchedulerSpec, factor: f64) -> Result<SchedulerSpec> {
    let mut out = spec.clone();
    match &mut out {
        SchedulerSpec::Greedy(cfg) | SchedulerSpec::GreedySimple(cfg) => cfg.factor = factor,
        SchedulerSpec::Baseline(_) => {
            return invalid(format!("{} has no scaling factor", spec.name()));
        }
    }
    out.validate()?;
    Ok(out)
}

fn greedy_bounds(spec: &SchedulerSpec) -> Result<(f64, f64)> {
    match spec {
        SchedulerSpec::Greedy(cfg) | SchedulerSpec::GreedySimple(cfg) => {
            Ok((cfg.min_lr, cfg.max_lr))
        }
        SchedulerSpec::Baseline(_) => invalid("the convergence bound needs a GreedyLR scheduler"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Result {
    pub total_steps: usize,
    /// Mean over seeds of `f(x̄_T) − f*`.
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `‖x₀ − x*‖² / (2·min_lr·T)`, the part of the bound that shrinks with `T`.
    pub rhs_transient: f64,
    /// `max_lr²·L / (2·min_lr)`.
    pub rhs_floor: f64,
    pub per_seed: Vec<f64>,
}

/// Runs `sched` for `total_steps` on `problem` once per seed and compares the
/// mean suboptimality of the average iterate with
/// `‖x₀ − x*‖²/(2·min_lr·T) + max_lr²·L/(2·min_lr)`.
///
/// Requires a known optimum and smoothness constant, and `max_lr < 2/L`.
pub fn theorem1_check(
    problem: &Problem,
    sched: &SchedulerSpec,
    total_steps: usize,
    seeds: &[u64],
) -> Result<Theorem1Result> {
    let f_star = problem.f_star().ok_or(Error::Missing("f_star"))?;
    let x_star = problem.x_star().ok_or(Error::Missing("x_star"))?;
    let l = problem.l_max().ok_or(Error::Missing("l_max"))?;
    let (min_lr, max_lr) = greedy_bounds(sched)?;
    if max_lr >= 2.0 / l {
        return invalid(format!("max_lr {max_lr} must be below 2/L = {}", 2.0 / l));
    }
    if seeds.is_empty() {
        return invalid("at least one seed is required");
    }

    let x0 = problem.initial_point();
    let dist_sq: f64 = x0.iter().zip(&x_star).map(|(a, b)| (a - b).powi(2)).sum();
    let rhs_transient = dist_sq / (2.0 * min_lr * total_steps as f64);
    let rhs_floor = max_lr * max_lr * l / (2.0 * min_lr);

    let per_seed = seeds
        .iter()
        .map(|&seed| {
            let cfg = RunConfig {
                total_steps,
                seed,
                ..RunConfig::new(problem.spec().clone(), sched.clone())
            };
            Ok(run_on(problem, &cfg)?.avg_iterate_full_loss - f_star)
        })
        .collect::<Result<Vec<f64>>>()?;
    let lhs = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    let rhs = rhs_transient + rhs_floor;
    Ok(Theorem1Result {
        total_steps,
        lhs,
        rhs,
        holds: lhs <= rhs,
        rhs_transient,
        rhs_floor,
        per_seed,
    })
}

/// [`theorem1_check`] for each horizon in `ladder`.
pub fn theorem1_ladder(
    problem: &Problem,
    sched: &SchedulerSpec,
    ladder: &[usize],
    seeds: &[u64],
) -> Result<Vec<Theorem1Result>> {
    ladder
        .iter()
        .map(|&t| theorem1_check(problem, sched, t, seeds))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorResult {
    pub factor: f64,
    /// Median over seeds of `f(x_T) − f*`; `+∞` for a diverged seed.
    pub final_suboptimality: f64,
    /// Whether this is `F* = 1 − 1/L`.
    pub is_optimal: bool,
    pub per_seed: Vec<f64>,
}

/// Final suboptimality of `sched` at each factor in `factors` plus the
/// theory-optimal `F* = 1 − 1/L`, which is inserted when absent. Rows are
/// sorted by factor. Needs `L > 1` so that `F*` lies in `(0, 1)`.
pub fn theorem2_sweep(
    problem: &Problem,
    sched: &SchedulerSpec,
    factors: &[f64],
    total_steps: usize,
    seeds: &[u64],
) -> Result<Vec<FactorResult>> {
    let f_star = problem.f_star().ok_or(Error::Missing("f_star"))?;
    let l = problem.l_max().ok_or(Error::Missing("l_max"))?;
    if l <= 1.0 {
        return invalid(format!("optimal factor 1 - 1/L needs L > 1, got L = {l}"));
    }
    let optimal = 1.0 - 1.0 / l;
    let mut grid = factors.to_vec();
    if !grid.iter().any(|&f| (f - optimal).abs() < 1e-12) {
        grid.push(optimal);
    }
    grid.sort_by(f64::total_cmp);

    grid.into_iter()
        .map(|factor| {
            let spec = with_factor(sched, factor)?;
            let per_seed = seeds
                .iter()
                .map(|&seed| {
                    let cfg = RunConfig {
                        total_steps,
                        seed,
                        ..RunConfig::new(problem.spec().clone(), spec.clone())
                    };
                    Ok(run_on(problem, &cfg)?.final_full_loss - f_star)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(FactorResult {
                factor,
                final_suboptimality: median(&per_seed),
                is_optimal: (factor - optimal).abs() < 1e-12,
                per_seed,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FSweepRow {
    pub factor: f64,
    /// Median over seeds of the summary's final loss.
    pub final_loss: f64,
    pub diverged_runs: usize,
    pub traces: Vec<Trace>,
    pub summaries: Vec<RunSummary>,
}

impl FSweepRow {
    pub fn runs(&self) -> usize {
        self.summaries.len()
    }

    /// True when the majority of seeds diverged.
    pub fn diverged(&self) -> bool {
        2 * self.diverged_runs > self.runs()
    }
}

/// Runs `base` with each GreedyLR factor and every seed, all else paired.
pub fn f_sweep(
    problem: &Problem,
    base: &RunConfig,
    noise: &NoiseSpec,
    factors: &[f64],
    seeds: &[u64],
) -> Result<Vec<FSweepRow>> {
    if seeds.is_empty() {
        return invalid("at least one seed is required");
    }
    factors
        .iter()
        .map(|&factor| {
            let spec = with_factor(&base.scheduler, factor)?;
            let mut traces = Vec::with_capacity(seeds.len());
            let mut summaries = Vec::with_capacity(seeds.len());
            for &seed in seeds {
                let cfg = RunConfig {
                    scheduler: spec.clone(),
                    noise: noise.clone(),
                    seed,
                    ..base.clone()
                };
                let trace = run_on(problem, &cfg)?;
                summaries.push(summarize(&trace)?);
                traces.push(trace);
            }
            let finals: Vec<f64> = summaries.iter().map(|s| s.final_loss).collect();
            Ok(FSweepRow {
                factor,
                final_loss: median(&finals),
                diverged_runs: summaries.iter().filter(|s| s.diverged).count(),
                traces,
                summaries,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{ProblemKind, ProblemSpec};
    use crate::sched::GreedyConfig;
    use nalgebra::{DMatrix, DVector};

    fn quad(l: f64) -> Problem {
        Problem::new(&ProblemSpec {
            smoothness: l,
            ..ProblemSpec::new(ProblemKind::QuadraticSum, 4, 16, 3)
        })
        .unwrap()
    }

    fn simple(l: f64) -> SchedulerSpec {
        SchedulerSpec::GreedySimple(GreedyConfig {
            min_lr: 0.1 / l,
            max_lr: 1.0 / l,
            ..GreedyConfig::new(0.5 / l)
        })
    }

    #[test]
    fn bound_holds_and_transient_shrinks() {
        let p = quad(2.0);
        let ladder = theorem1_ladder(&p, &simple(2.0), &[100, 1000], &[0, 1, 2]).unwrap();
        assert!(ladder.iter().all(|r| r.holds));
        assert!(ladder[1].rhs_transient < ladder[0].rhs_transient);
        assert_eq!(ladder[0].rhs_floor, ladder[1].rhs_floor);
    }

    #[test]
    fn bound_is_zero_at_the_optimum_of_an_interpolating_problem() {
        let parts = vec![
            (DMatrix::identity(2, 2), DVector::zeros(2)),
            (DMatrix::identity(2, 2) * 2.0, DVector::zeros(2)),
        ];
        let p = Problem::quadratic(parts)
            .unwrap()
            .with_start(vec![0.0, 0.0])
            .unwrap();
        let r = theorem1_check(&p, &simple(2.0), 50, &[0]).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn unstable_max_lr_rejected() {
        let p = quad(2.0);
        let s = SchedulerSpec::GreedySimple(GreedyConfig {
            min_lr: 0.1,
            max_lr: 1.0,
            ..GreedyConfig::new(0.5)
        });
        assert!(theorem1_check(&p, &s, 100, &[0]).is_err());
    }

    #[test]
    fn missing_optimum_is_an_error() {
        let p = Problem::new(&ProblemSpec::new(ProblemKind::Mlp, 3, 8, 0)).unwrap();
        assert_eq!(
            theorem1_check(&p, &simple(2.0), 100, &[0]).unwrap_err(),
            Error::Missing("f_star")
        );
    }

    #[test]
    fn optimal_factor_is_inserted() {
        let p = quad(2.0);
        let rows = theorem2_sweep(&p, &simple(2.0), &[0.1, 0.9], 100, &[0, 1]).unwrap();
        let factors: Vec<f64> = rows.iter().map(|r| r.factor).collect();
        assert_eq!(factors.len(), 3);
        assert!((factors[1] - 0.5).abs() < 1e-12);
        assert!(rows[1].is_optimal);
        assert!(theorem2_sweep(&quad(0.8), &simple(0.8), &[0.5], 100, &[0]).is_err());
    }

    #[test]
    fn f_sweep_pairs_runs() {
        let p = quad(2.0);
        let base = RunConfig {
            total_steps: 40,
            ..RunConfig::new(p.spec().clone(), simple(2.0))
        };
        let rows = f_sweep(&p, &base, &NoiseSpec::none(), &[0.25, 0.5, 0.99], &[0, 1]).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.runs(), 2);
            assert_eq!(r.traces[0].sample_index, rows[0].traces[0].sample_index);
        }
        let baseline = SchedulerSpec::constant(0.1, 40);
        assert!(with_factor(&baseline, 0.5).is_err());
        assert!(with_factor(&simple(2.0), 1.0).is_err());
    }
}
