//! Learning-rate schedulers.
//!
//! Every scheduler implements [`LrScheduler`]: feed it the metric observed at
//! the current step and it returns the learning rate to use for that step.
//! Closed-form baselines ignore the metric.

mod baseline;
mod greedy;

pub use baseline::{baseline_lr, Baseline, BaselineConfig, BaselineKind};
pub use greedy::{
    is_better, GreedyConfig, GreedyLr, GreedyState, Mode, SimpleGreedyLr, StreamingMean,
};

use crate::error::Result;

pub trait LrScheduler {
    /// Observes `metric` and returns the learning rate for this step.
    fn step(&mut self, metric: f64) -> Result<f64>;

    /// The most recently returned (or initial) learning rate.
    fn lr(&self) -> f64;
}

impl<S: LrScheduler + ?Sized> LrScheduler for Box<S> {
    fn step(&mut self, metric: f64) -> Result<f64> {
        (**self).step(metric)
    }

    fn lr(&self) -> f64 {
        (**self).lr()
    }
}

/// A fully specified scheduler, ready to be instantiated for one run.
#[derive(Debug, Clone, PartialEq)]
pub enum SchedulerSpec {
    Greedy(GreedyConfig),
    GreedySimple(GreedyConfig),
    Baseline(BaselineConfig),
}

impl SchedulerSpec {
    /// A constant learning rate for `total_steps` steps.
    pub fn constant(lr: f64, total_steps: usize) -> Self {
        SchedulerSpec::Baseline(BaselineConfig {
            min_lr: lr,
            ..BaselineConfig::new(BaselineKind::ConstantWarmup, lr, total_steps)
        })
    }

    pub fn build(&self) -> Result<Box<dyn LrScheduler + Send>> {
        Ok(match self {
            SchedulerSpec::Greedy(cfg) => Box::new(GreedyLr::new(cfg.clone())?),
            SchedulerSpec::GreedySimple(cfg) => Box::new(SimpleGreedyLr::new(cfg)?),
            SchedulerSpec::Baseline(cfg) => Box::new(Baseline::new(cfg.clone())?),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchedulerSpec::Greedy(cfg) | SchedulerSpec::GreedySimple(cfg) => cfg.validate(),
            SchedulerSpec::Baseline(cfg) => cfg.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerSpec::Greedy(_) => "greedy",
            SchedulerSpec::GreedySimple(_) => "greedy_simple",
            SchedulerSpec::Baseline(cfg) => cfg.kind.name(),
        }
    }

    /// The GreedyLR factor, if this is a GreedyLR scheduler.
    pub fn factor(&self) -> Option<f64> {
        match self {
            SchedulerSpec::Greedy(cfg) | SchedulerSpec::GreedySimple(cfg) => Some(cfg.factor),
            SchedulerSpec::Baseline(_) => None,
        }
    }

    pub fn initial_lr(&self) -> f64 {
        match self {
            SchedulerSpec::Greedy(cfg) | SchedulerSpec::GreedySimple(cfg) => cfg.initial_lr,
            SchedulerSpec::Baseline(cfg) => cfg.initial_lr,
        }
    }
}
