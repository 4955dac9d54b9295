//! Closed-form learning-rate schedules used as comparison baselines.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::LrScheduler;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Cosine,
    CosineRestarts,
    Exponential,
    Linear,
    Polynomial,
    ConstantWarmup,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::Cosine,
        BaselineKind::CosineRestarts,
        BaselineKind::Exponential,
        BaselineKind::Linear,
        BaselineKind::Polynomial,
        BaselineKind::ConstantWarmup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Cosine => "cosine",
            BaselineKind::CosineRestarts => "cosine_restarts",
            BaselineKind::Exponential => "exponential",
            BaselineKind::Linear => "linear",
            BaselineKind::Polynomial => "polynomial",
            BaselineKind::ConstantWarmup => "constant_warmup",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub total_steps: usize,
    /// `ConstantWarmup` only.
    pub warmup_steps: usize,
    /// `CosineRestarts` only.
    pub restart_period: usize,
    /// `Exponential` only, in `(0, 1]`.
    pub decay_rate: f64,
    /// `Polynomial` only.
    pub power: f64,
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind, initial_lr: f64, total_steps: usize) -> Self {
        Self {
            kind,
            initial_lr,
            min_lr: 0.0,
            total_steps,
            warmup_steps: 0,
            restart_period: (total_steps / 4).max(1),
            decay_rate: 0.98,
            power: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return invalid(format!(
                "initial_lr must be positive, got {}",
                self.initial_lr
            ));
        }
        if !(self.min_lr >= 0.0 && self.min_lr <= self.initial_lr) {
            return invalid(format!(
                "require 0 <= min_lr <= initial_lr, got {} and {}",
                self.min_lr, self.initial_lr
            ));
        }
        if self.total_steps == 0 {
            return invalid("total_steps must be positive");
        }
        if self.warmup_steps >= self.total_steps {
            return invalid(format!(
                "warmup_steps ({}) must be below total_steps ({})",
                self.warmup_steps, self.total_steps
            ));
        }
        if self.kind == BaselineKind::CosineRestarts && self.restart_period == 0 {
            return invalid("restart_period must be positive");
        }
        if self.kind == BaselineKind::Exponential
            && !(self.decay_rate > 0.0 && self.decay_rate <= 1.0)
        {
            return invalid(format!(
                "decay_rate must lie in (0, 1], got {}",
                self.decay_rate
            ));
        }
        if self.kind == BaselineKind::Polynomial && !(self.power > 0.0 && self.power.is_finite()) {
            return invalid(format!("power must be positive, got {}", self.power));
        }
        Ok(())
    }
}

fn cosine(init: f64, min: f64, t: f64, period: f64) -> f64 {
    min + 0.5 * (init - min) * (1.0 + (PI * t / period).cos())
}

/// Learning rate of a baseline schedule at step `t ∈ [0, total_steps]`.
pub fn baseline_lr(cfg: &BaselineConfig, t: usize) -> Result<f64> {
    if t > cfg.total_steps {
        return Err(Error::StepOutOfRange {
            t,
            total: cfg.total_steps,
        });
    }
    let (init, min) = (cfg.initial_lr, cfg.min_lr);
    let total = cfg.total_steps as f64;
    let tf = t as f64;
    let lr = match cfg.kind {
        BaselineKind::Cosine => cosine(init, min, tf, total),
        BaselineKind::CosineRestarts => {
            let period = cfg.restart_period;
            cosine(init, min, (t % period) as f64, period as f64)
        }
        BaselineKind::Exponential => (init * cfg.decay_rate.powf(tf)).max(min),
        BaselineKind::Linear => init + (min - init) * tf / total,
        BaselineKind::Polynomial => min + (init - min) * (1.0 - tf / total).powf(cfg.power),
        BaselineKind::ConstantWarmup => {
            if t < cfg.warmup_steps {
                init * tf / cfg.warmup_steps as f64
            } else {
                init
            }
        }
    };
    Ok(lr)
}

/// A baseline schedule driven through [`LrScheduler`]; the `k`-th call to
/// `step` returns `baseline_lr(cfg, k)` (clamped at `total_steps`) and ignores
/// the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    cfg: BaselineConfig,
    t: usize,
    lr: f64,
}

impl Baseline {
    pub fn new(cfg: BaselineConfig) -> Result<Self> {
        cfg.validate()?;
        let lr = baseline_lr(&cfg, 0)?;
        Ok(Self { cfg, t: 0, lr })
    }

    pub fn config(&self) -> &BaselineConfig {
        &self.cfg
    }
}

impl LrScheduler for Baseline {
    fn step(&mut self, _metric: f64) -> Result<f64> {
        self.lr = baseline_lr(&self.cfg, self.t.min(self.cfg.total_steps))?;
        self.t += 1;
        Ok(self.lr)
    }

    fn lr(&self) -> f64 {
        self.lr
    }
}
