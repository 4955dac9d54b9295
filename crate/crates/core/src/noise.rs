//! Additive perturbations of the loss value a scheduler observes.
//!
//! Noise is applied to the scalar metric handed to the scheduler and never to
//! the gradient: the optimizer always sees the exact component gradient. Since
//! every perturbation here is independent of the parameters, adding it to the
//! loss would leave the gradient unchanged anyway; keeping the two paths
//! separate makes that hold bit for bit.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    Gaussian,
    PeriodicSpike,
    RandomSpike,
    Adversarial,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::None,
        NoiseKind::Gaussian,
        NoiseKind::PeriodicSpike,
        NoiseKind::RandomSpike,
        NoiseKind::Adversarial,
    ];

    pub fn is_spike(self) -> bool {
        matches!(self, NoiseKind::PeriodicSpike | NoiseKind::RandomSpike)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::None => "none",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::PeriodicSpike => "periodic_spike",
            NoiseKind::RandomSpike => "random_spike",
            NoiseKind::Adversarial => "adversarial",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    #[serde(default)]
    pub strength: f64,
    /// Spike period; drawn uniformly from `50..=100` per run when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default = "default_spike_prob")]
    pub spike_prob: f64,
}

fn default_spike_prob() -> f64 {
    0.02
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::new(NoiseKind::None, 0.0)
    }

    pub fn new(kind: NoiseKind, strength: f64) -> Self {
        Self {
            kind,
            strength,
            period: None,
            spike_prob: default_spike_prob(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return invalid(format!(
                "noise strength must be nonnegative, got {}",
                self.strength
            ));
        }
        if self.period == Some(0) {
            return invalid("spike period must be positive");
        }
        if !(0.0..=1.0).contains(&self.spike_prob) {
            return invalid(format!(
                "spike_prob must lie in [0, 1], got {}",
                self.spike_prob
            ));
        }
        Ok(())
    }
}

/// Per-run noise state, drawing from the run's dedicated noise stream.
#[derive(Debug, Clone)]
pub struct NoiseState {
    spec: NoiseSpec,
    rng: ChaCha8Rng,
    period: usize,
    abs_sum: f64,
    seen: usize,
    prev_true: Option<f64>,
    last_spike: bool,
}

impl NoiseState {
    pub fn new(spec: &NoiseSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = stream(seed, Stream::Noise);
        let period = match (spec.kind, spec.period) {
            (_, Some(p)) => p,
            (NoiseKind::PeriodicSpike, None) => rng.random_range(50..=100),
            (_, None) => 0,
        };
        Ok(Self {
            spec: spec.clone(),
            rng,
            period,
            abs_sum: 0.0,
            seen: 0,
            prev_true: None,
            last_spike: false,
        })
    }

    /// Resolved spike period (zero unless the kind uses one).
    pub fn period(&self) -> usize {
        self.period
    }

    /// Whether the last call to [`perturb`](Self::perturb) added a spike.
    pub fn last_spike(&self) -> bool {
        self.last_spike
    }

    /// Observed loss at step `t` for the given true loss.
    pub fn perturb(&mut self, true_loss: f64, t: usize) -> f64 {
        self.abs_sum += true_loss.abs();
        self.seen += 1;
        let scale = self.abs_sum / self.seen as f64;
        let s = self.spec.strength;
        self.last_spike = false;

        let observed = match self.spec.kind {
            NoiseKind::None => true_loss,
            NoiseKind::Gaussian => {
                let z: f64 = self.rng.sample(StandardNormal);
                true_loss + s * z
            }
            NoiseKind::PeriodicSpike => {
                if t > 0 && t.is_multiple_of(self.period) {
                    self.last_spike = true;
                    true_loss + s * scale
                } else {
                    true_loss
                }
            }
            NoiseKind::RandomSpike => {
                let u: f64 = self.rng.random();
                if u < self.spec.spike_prob {
                    self.last_spike = true;
                    true_loss + s * scale
                } else {
                    true_loss
                }
            }
            NoiseKind::Adversarial => {
                let gain = self
                    .prev_true
                    .map_or(0.0, |prev| (prev - true_loss).max(0.0));
                true_loss + s * gain
            }
        };
        self.prev_true = Some(true_loss);
        observed
    }
}
