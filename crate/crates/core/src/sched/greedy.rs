//! GreedyLR: divide the learning rate by `F` when the loss improves, multiply
//! by `F` when it does not.
//!
//! Two forms are provided. [`SimpleGreedyLr`] reacts to every single loss
//! change. [`GreedyLr`] adds the controls needed on noisy losses: a relative
//! improvement threshold, optional streaming-mean smoothing, patience,
//! cooldown and warmup windows, learning-rate bounds and a periodic reset
//! once the rate has been pinned at its lower bound.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::LrScheduler;
use crate::error::{invalid, Error, Result};

/// Direction in which the monitored metric improves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Min,
    Max,
}

impl Mode {
    /// The value every finite metric improves on.
    pub fn worst(self) -> f64 {
        match self {
            Mode::Min => f64::INFINITY,
            Mode::Max => f64::NEG_INFINITY,
        }
    }
}

/// Relative improvement test.
///
/// In `Min` mode `a` improves on `best` when `a < best * (1 - threshold)`; in
/// `Max` mode when `a > best * (1 + threshold)`. The initial `best` (the mode's
/// worst value) is beaten by any finite `a`.
pub fn is_better(a: f64, best: f64, mode: Mode, threshold: f64) -> bool {
    if best == mode.worst() {
        return a.is_finite();
    }
    match mode {
        Mode::Min => a < best * (1.0 - threshold),
        Mode::Max => a > best * (1.0 + threshold),
    }
}

/// Arithmetic mean over the most recent `window` observations.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamingMean {
    window: usize,
    buf: VecDeque<f64>,
}

impl StreamingMean {
    pub fn new(window: usize) -> Self {
        assert!(window >= 1, "window must be at least 1");
        Self {
            window,
            buf: VecDeque::with_capacity(window + 1),
        }
    }

    /// Pushes `value` and returns the mean of the (possibly partial) window.
    pub fn push(&mut self, value: f64) -> f64 {
        self.buf.push_back(value);
        if self.buf.len() > self.window {
            self.buf.pop_front();
        }
        // Summed from scratch so the result depends only on the window contents.
        self.buf.iter().sum::<f64>() / self.buf.len() as f64
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn clear(&mut self) {
        self.buf.clear();
    }

    pub fn window(&self) -> usize {
        self.window
    }
}

/// Parameters of the detailed GreedyLR scheduler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    /// Multiplicative factor `F ∈ (0, 1)`.
    pub factor: f64,
    /// Consecutive good (bad) steps tolerated before increasing (reducing).
    pub patience: usize,
    /// Relative improvement required to count as better.
    pub threshold: f64,
    /// Steps after a reduction during which bad steps are ignored.
    pub cooldown: usize,
    /// Steps after an increase during which good steps are ignored.
    pub warmup: usize,
    pub min_lr: f64,
    pub max_lr: f64,
    /// Learning-rate changes no larger than this are skipped.
    pub eps: f64,
    pub smoothing: bool,
    pub window_size: usize,
    /// Steps spent at the lower bound before the controller state resets.
    /// Zero disables resetting.
    pub reset_start: usize,
    pub mode: Mode,
    pub initial_lr: f64,
}

impl GreedyConfig {
    /// Defaults around `initial_lr`: `F = 0.95`, patience 10, bounds at 10% and
    /// 10x the initial rate, no threshold, cooldown, warmup, smoothing or reset.
    pub fn new(initial_lr: f64) -> Self {
        Self {
            factor: 0.95,
            patience: 10,
            threshold: 0.0,
            cooldown: 0,
            warmup: 0,
            min_lr: 0.1 * initial_lr,
            max_lr: 10.0 * initial_lr,
            eps: 1e-8,
            smoothing: false,
            window_size: 50,
            reset_start: 0,
            mode: Mode::Min,
            initial_lr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return invalid(format!("factor must lie in (0, 1), got {}", self.factor));
        }
        if !(self.min_lr > 0.0 && self.min_lr.is_finite()) {
            return invalid(format!("min_lr must be positive, got {}", self.min_lr));
        }
        if !(self.min_lr <= self.initial_lr && self.initial_lr <= self.max_lr) {
            return invalid(format!(
                "require min_lr <= initial_lr <= max_lr, got {} <= {} <= {}",
                self.min_lr, self.initial_lr, self.max_lr
            ));
        }
        if !self.max_lr.is_finite() {
            return invalid("max_lr must be finite");
        }
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return invalid(format!(
                "threshold must be nonnegative, got {}",
                self.threshold
            ));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return invalid(format!("eps must be nonnegative, got {}", self.eps));
        }
        if self.window_size == 0 {
            return invalid("window_size must be at least 1");
        }
        Ok(())
    }
}

/// Mutable controller state of [`GreedyLr`].
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyState {
    pub current_lr: f64,
    pub best: f64,
    pub num_bad_epochs: usize,
    pub num_good_epochs: usize,
    pub cooldown_counter: usize,
    pub warmup_counter: usize,
    pub last_epoch: i64,
    pub reset_countdown: usize,
    pub smoothing: StreamingMean,
}

impl GreedyState {
    /// Fresh state for a validated config.
    pub fn init(cfg: &GreedyConfig) -> Self {
        Self {
            current_lr: cfg.initial_lr,
            best: cfg.mode.worst(),
            num_bad_epochs: 0,
            num_good_epochs: 0,
            cooldown_counter: 0,
            warmup_counter: 0,
            last_epoch: 0,
            reset_countdown: cfg.reset_start,
            smoothing: StreamingMean::new(cfg.window_size),
        }
    }
}

/// The detailed GreedyLR scheduler.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyLr {
    cfg: GreedyConfig,
    state: GreedyState,
}

impl GreedyLr {
    pub fn new(cfg: GreedyConfig) -> Result<Self> {
        cfg.validate()?;
        let state = GreedyState::init(&cfg);
        Ok(Self { cfg, state })
    }

    pub fn config(&self) -> &GreedyConfig {
        &self.cfg
    }

    pub fn state(&self) -> &GreedyState {
        &self.state
    }

    /// Clears the controller (best value, counters, smoothing window and the
    /// reset countdown) while keeping the current learning rate.
    pub fn reset(&mut self) {
        let lr = self.state.current_lr;
        let last_epoch = self.state.last_epoch;
        self.state = GreedyState::init(&self.cfg);
        self.state.current_lr = lr;
        self.state.last_epoch = last_epoch;
    }

    /// `lr ← max(lr·F, min_lr)`, applied only when the change exceeds `eps`.
    pub fn reduce_lr(&mut self) {
        let old = self.state.current_lr;
        let new = (old * self.cfg.factor).max(self.cfg.min_lr);
        if old - new > self.cfg.eps {
            self.state.current_lr = new;
        }
    }

    /// `lr ← min(lr/F, max_lr)`, applied only when the change exceeds `eps`.
    pub fn increase_lr(&mut self) {
        let old = self.state.current_lr;
        let new = (old / self.cfg.factor).min(self.cfg.max_lr);
        if new - old > self.cfg.eps {
            self.state.current_lr = new;
        }
    }

    fn advance(&mut self, raw: f64) -> f64 {
        let cfg = &self.cfg;
        let st = &mut self.state;

        let current = if cfg.smoothing {
            st.smoothing.push(raw)
        } else {
            raw
        };
        st.last_epoch += 1;

        if is_better(current, st.best, cfg.mode, cfg.threshold) {
            st.best = current;
            st.num_bad_epochs = 0;
            st.num_good_epochs += 1;
        } else {
            st.num_bad_epochs += 1;
            st.num_good_epochs = 0;
        }

        if st.cooldown_counter > 0 {
            st.cooldown_counter -= 1;
            st.num_bad_epochs = 0;
        }
        if st.warmup_counter > 0 {
            st.warmup_counter -= 1;
            st.num_good_epochs = 0;
        }

        if self.state.num_bad_epochs > self.cfg.patience {
            self.reduce_lr();
            self.state.cooldown_counter = self.cfg.cooldown;
            self.state.num_bad_epochs = 0;
        }
        if self.state.num_good_epochs > self.cfg.patience {
            self.increase_lr();
            self.state.warmup_counter = self.cfg.warmup;
            self.state.num_good_epochs = 0;
        }

        if self.cfg.reset_start > 0 {
            if self.state.reset_countdown == 0 {
                self.reset();
            }
            if self.state.current_lr <= self.cfg.min_lr + self.cfg.eps {
                self.state.reset_countdown -= 1;
            }
        }

        self.state.current_lr
    }
}

impl LrScheduler for GreedyLr {
    fn step(&mut self, metric: f64) -> Result<f64> {
        if !metric.is_finite() {
            return Err(Error::InvalidMetric(metric));
        }
        Ok(self.advance(metric))
    }

    fn lr(&self) -> f64 {
        self.state.current_lr
    }
}

/// The minimal GreedyLR rule: every step divides the rate by `F` if the loss
/// fell strictly below the previous one, and multiplies it by `F` otherwise.
///
/// Only `factor`, `min_lr`, `max_lr` and `initial_lr` of the config are used.
/// The first loss is compared against `+∞` and therefore counts as an
/// improvement.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleGreedyLr {
    factor: f64,
    min_lr: f64,
    max_lr: f64,
    lr: f64,
    prev_loss: f64,
}

impl SimpleGreedyLr {
    pub fn new(cfg: &GreedyConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            factor: cfg.factor,
            min_lr: cfg.min_lr,
            max_lr: cfg.max_lr,
            lr: cfg.initial_lr,
            prev_loss: f64::INFINITY,
        })
    }

    /// Previous loss the next observation is compared against.
    pub fn prev_loss(&self) -> f64 {
        self.prev_loss
    }

    /// Overrides the remembered state, e.g. to resume from a checkpoint.
    pub fn set_state(&mut self, lr: f64, prev_loss: f64) {
        self.lr = lr.clamp(self.min_lr, self.max_lr);
        self.prev_loss = prev_loss;
    }
}

impl LrScheduler for SimpleGreedyLr {
    fn step(&mut self, loss: f64) -> Result<f64> {
        if !loss.is_finite() {
            return Err(Error::InvalidMetric(loss));
        }
        let next = if loss < self.prev_loss {
            self.lr / self.factor
        } else {
            self.lr * self.factor
        };
        self.lr = next.clamp(self.min_lr, self.max_lr);
        self.prev_loss = loss;
        Ok(self.lr)
    }

    fn lr(&self) -> f64 {
        self.lr
    }
}
