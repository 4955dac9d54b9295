use serde::Serialize;

use super::Trace;
use crate::error::{Error, Result};

/// Scalar metrics of one run, all computed from the true (unperturbed) loss.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    /// Loss at 10%, 50% and 100% of the configured steps.
    pub stage_losses: [f64; 3],
    /// Mean true loss over the last 10 steps; `+∞` when diverged.
    pub final_loss: f64,
    pub max_loss: f64,
    /// `max_loss / final_loss`; absent when diverged or `final_loss <= 0`.
    pub recovery_ratio: Option<f64>,
    /// Steps from the peak loss until the loss first falls below the value
    /// recorded one step before the peak.
    pub recovery_speed: Option<usize>,
    pub diverged: bool,
}

const FINAL_WINDOW: usize = 10;

/// 1-based step indices `⌈T/10⌉`, `⌈T/2⌉`, `T` at which stage losses are read.
pub fn stage_indices(total_steps: usize) -> [usize; 3] {
    [
        total_steps.div_ceil(10),
        total_steps.div_ceil(2),
        total_steps,
    ]
}

pub fn summarize(trace: &Trace) -> Result<RunSummary> {
    let losses = &trace.true_loss;
    if losses.is_empty() && !trace.diverged {
        return Err(Error::Missing("trace steps"));
    }
    let stage_losses = stage_indices(trace.total_steps)
        .map(|s| losses.get(s - 1).copied().unwrap_or(f64::INFINITY));

    if trace.diverged {
        return Ok(RunSummary {
            stage_losses,
            final_loss: f64::INFINITY,
            max_loss: f64::INFINITY,
            recovery_ratio: None,
            recovery_speed: None,
            diverged: true,
        });
    }

    let tail = &losses[losses.len().saturating_sub(FINAL_WINDOW)..];
    let final_loss = tail.iter().sum::<f64>() / tail.len() as f64;
    let (peak, max_loss) =
        losses
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    let recovery_ratio = (final_loss > 0.0).then(|| max_loss / final_loss);
    let recovery_speed = if peak == 0 {
        None
    } else {
        let before = losses[peak - 1];
        losses[peak + 1..]
            .iter()
            .position(|&l| l < before)
            .map(|p| p + 1)
    };

    Ok(RunSummary {
        stage_losses,
        final_loss,
        max_loss,
        recovery_ratio,
        recovery_speed,
        diverged: false,
    })
}

/// Linearly interpolated percentile (`p ∈ [0, 100]`) of already sorted data.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let rank = (p / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        return a;
    }
    a + (b - a) * (rank - lo as f64)
}

/// Median of unsorted data (`NaN` for empty input).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    percentile(&v, 50.0)
}
