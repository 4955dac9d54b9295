//! Running optimizers under schedulers and measuring what happened.
//!
//! A run samples a component each step, evaluates its exact loss and
//! gradient, perturbs the loss for the scheduler, asks the scheduler for a
//! learning rate and takes an optimizer step:
//!
//! ```text
//! i_t ~ Unif{0..n}          (sampling stream)
//! (l_t, g_t) = f_i(x_t), ∇f_i(x_t)
//! o_t = l_t + noise_t       (noise stream; scheduler input only)
//! γ_t = scheduler.step(o_t)
//! x_{t+1} = optimizer(x_t, g_t, γ_t)
//! ```
//!
//! Both streams are derived from the run seed alone, so runs that differ only
//! in scheduler or noise see the same component sequence.

mod classify;
mod grid;
mod summary;
mod theory;

pub use classify::{
    classify, classify_paired, ComparisonVerdict, Cutoff, PairKey, StageComparison, Verdict,
    VerdictCounts,
};
pub use grid::{
    run_grid, BaselineTemplate, GreedyTemplate, GridProblem, GridResult, GridRow, GridSpec,
    SchedulerStats, SchedulerTemplate,
};
pub use summary::{median, percentile, stage_indices, summarize, RunSummary};
pub use theory::{
    f_sweep, theorem1_check, theorem1_ladder, theorem2_sweep, with_factor, FSweepRow, FactorResult,
    Theorem1Result,
};

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::noise::{NoiseSpec, NoiseState};
use crate::optim::{Iterate, Optimizer, OptimizerKind, StepStatus};
use crate::problems::{Problem, ProblemSpec};
use crate::rng::{stream, Stream};
use crate::sched::SchedulerSpec;

/// Losses or iterate components beyond this magnitude mark a run diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Minimum run length; stage metrics need 10% resolution.
pub const MIN_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub scheduler: SchedulerSpec,
    pub optimizer: OptimizerKind,
    pub noise: NoiseSpec,
    pub total_steps: usize,
    pub seed: u64,
    pub record_iterates: bool,
    /// Overrides the problem's default starting point.
    pub start: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn new(problem: ProblemSpec, scheduler: SchedulerSpec) -> Self {
        Self {
            problem,
            scheduler,
            optimizer: OptimizerKind::Sgd,
            noise: NoiseSpec::none(),
            total_steps: 200,
            seed: 0,
            record_iterates: false,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_steps < MIN_STEPS {
            return invalid(format!(
                "total_steps must be at least {MIN_STEPS}, got {}",
                self.total_steps
            ));
        }
        self.problem.validate()?;
        self.scheduler.validate()?;
        self.noise.validate()
    }
}

/// Per-step record of one run. All per-step vectors have equal length, which
/// is `total_steps` unless the run diverged and was cut short.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub total_steps: usize,
    pub sample_index: Vec<usize>,
    pub true_loss: Vec<f64>,
    pub observed_loss: Vec<f64>,
    pub lr: Vec<f64>,
    pub grad_norm: Vec<f64>,
    pub diverged: bool,
    /// `x̄ = (1/T) Σ_{t<T} x_t` over the recorded steps.
    pub average_iterate: Vec<f64>,
    pub final_iterate: Vec<f64>,
    /// `f(x_T)`, or `+∞` when diverged.
    pub final_full_loss: f64,
    /// `f(x̄_T)`, or `+∞` when diverged.
    pub avg_iterate_full_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterates: Option<Vec<Vec<f64>>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.true_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_loss.is_empty()
    }
}

/// What a run saw at step `t`, before the optimizer update.
#[derive(Debug)]
pub struct StepRecord<'a> {
    pub t: usize,
    pub index: usize,
    pub true_loss: f64,
    pub observed_loss: f64,
    pub lr: f64,
    /// The exact gradient handed to the optimizer.
    pub grad: &'a [f64],
    /// The iterate `x_t` at which loss and gradient were evaluated.
    pub x: &'a [f64],
}

/// Builds the problem and runs `cfg`.
pub fn run_one(cfg: &RunConfig) -> Result<Trace> {
    let problem = Problem::new(&cfg.problem)?;
    run_on(&problem, cfg)
}

/// Runs `cfg` on an already built problem (`cfg.problem` is not consulted).
pub fn run_on(problem: &Problem, cfg: &RunConfig) -> Result<Trace> {
    run_observed(problem, cfg, |_| {})
}

/// [`run_on`] with a callback invoked at every recorded step.
pub fn run_observed(
    problem: &Problem,
    cfg: &RunConfig,
    mut observer: impl FnMut(&StepRecord<'_>),
) -> Result<Trace> {
    if cfg.total_steps < MIN_STEPS {
        return invalid(format!(
            "total_steps must be at least {MIN_STEPS}, got {}",
            cfg.total_steps
        ));
    }
    cfg.noise.validate()?;
    let d = problem.dimension();
    let n = problem.n_components();
    let start = cfg
        .start
        .clone()
        .unwrap_or_else(|| problem.initial_point().to_vec());
    if start.len() != d {
        return Err(crate::Error::DimensionMismatch {
            expected: d,
            got: start.len(),
        });
    }

    let mut sched = cfg.scheduler.build()?;
    let mut opt = Optimizer::new(cfg.optimizer, d);
    let mut sampler = stream(cfg.seed, Stream::Sampling);
    let mut noise = NoiseState::new(&cfg.noise, cfg.seed)?;
    let mut x = Iterate::new(start);

    let steps = cfg.total_steps;
    let mut trace = Trace {
        total_steps: steps,
        sample_index: Vec::with_capacity(steps),
        true_loss: Vec::with_capacity(steps),
        observed_loss: Vec::with_capacity(steps),
        lr: Vec::with_capacity(steps),
        grad_norm: Vec::with_capacity(steps),
        diverged: false,
        average_iterate: vec![0.0; d],
        final_iterate: Vec::new(),
        final_full_loss: f64::INFINITY,
        avg_iterate_full_loss: f64::INFINITY,
        iterates: cfg.record_iterates.then(Vec::new),
    };
    let mut sum = vec![0.0; d];
    let mut grad = vec![0.0; d];

    for t in 0..steps {
        let i = sampler.random_range(0..n);
        let loss = problem.eval_component_into(i, &x.x, &mut grad)?;
        if !loss.is_finite() || loss.abs() > DIVERGENCE_THRESHOLD {
            trace.diverged = true;
            break;
        }
        let observed = noise.perturb(loss, t);
        let lr = sched.step(observed)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();

        for (s, xi) in sum.iter_mut().zip(&x.x) {
            *s += xi;
        }
        if let Some(its) = trace.iterates.as_mut() {
            its.push(x.x.clone());
        }
        trace.sample_index.push(i);
        trace.true_loss.push(loss);
        trace.observed_loss.push(observed);
        trace.lr.push(lr);
        trace.grad_norm.push(grad_norm);
        observer(&StepRecord {
            t,
            index: i,
            true_loss: loss,
            observed_loss: observed,
            lr,
            grad: &grad,
            x: &x.x,
        });

        let status = opt.step(&mut x, &grad, lr)?;
        if status == StepStatus::Diverged || x.x.iter().any(|v| v.abs() > DIVERGENCE_THRESHOLD) {
            trace.diverged = true;
            break;
        }
    }

    let recorded = trace.len().max(1) as f64;
    trace.average_iterate = sum.iter().map(|s| s / recorded).collect();
    if !trace.diverged {
        trace.final_full_loss = problem.eval_full(&x.x)?.0;
        trace.avg_iterate_full_loss = problem.eval_full(&trace.average_iterate)?.0;
    }
    trace.final_iterate = x.x;
    Ok(trace)
}

/// Checks that the gradient the optimizer receives under `noise` is bitwise
/// the exact component gradient, and bitwise the gradient of the noise-free
/// run with the same seed. Uses a constant learning rate so that noise cannot
/// influence the trajectory through the scheduler.
pub fn gradient_untouched_check(problem: &Problem, x: &[f64], noise: &NoiseSpec) -> Result<bool> {
    const STEPS: usize = 50;
    let lr = problem.l_max().map_or(1e-3, |l| 0.5 / l);
    let cfg = RunConfig {
        noise: noise.clone(),
        total_steps: STEPS,
        start: Some(x.to_vec()),
        ..RunConfig::new(problem.spec().clone(), SchedulerSpec::constant(lr, STEPS))
    };
    let clean = RunConfig {
        noise: NoiseSpec::none(),
        ..cfg.clone()
    };

    let mut exact = true;
    let mut grads: Vec<Vec<u64>> = Vec::new();
    run_observed(problem, &cfg, |rec| {
        let (_, g) = problem
            .eval_component(rec.index, rec.x)
            .expect("index and dimension come from the run");
        exact &= bits(&g) == bits(rec.grad);
        grads.push(bits(rec.grad));
    })?;
    let mut clean_grads: Vec<Vec<u64>> = Vec::new();
    run_observed(problem, &clean, |rec| clean_grads.push(bits(rec.grad)))?;
    Ok(exact && grads == clean_grads)
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}
