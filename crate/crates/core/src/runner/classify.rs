//! Paired GreedyLR-vs-baseline comparison at the 10/50/100% stages.
//!
//! For each stage `delta = baseline_loss − greedy_loss`. A positive delta is a
//! `yes` (GreedyLR lower), otherwise `no`; the verdict is starred when the
//! difference is below the significance cutoff.

use std::fmt;

use serde::Serialize;

use super::RunSummary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    YesStar,
    No,
    NoStar,
}

impl Verdict {
    /// The verdict seen from the other side of the comparison.
    pub fn flipped(self) -> Self {
        match self {
            Verdict::Yes => Verdict::No,
            Verdict::YesStar => Verdict::NoStar,
            Verdict::No => Verdict::Yes,
            Verdict::NoStar => Verdict::YesStar,
        }
    }

    pub fn is_starred(self) -> bool {
        matches!(self, Verdict::YesStar | Verdict::NoStar)
    }

    /// `yes`, `yes*` or `no*`.
    pub fn as_good_or_better(self) -> bool {
        self != Verdict::No
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::YesStar => "yes*",
            Verdict::No => "no",
            Verdict::NoStar => "no*",
        })
    }
}

/// Significance cutoff for starring a verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// `|delta| < c` in loss units.
    Absolute(f64),
    /// `|delta| < c·|greedy_loss|`.
    Relative(f64),
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff::Absolute(0.1)
    }
}

impl Cutoff {
    fn insignificant(self, delta: f64, greedy_loss: f64) -> bool {
        match self {
            Cutoff::Absolute(c) => delta.abs() < c,
            Cutoff::Relative(c) => delta.abs() < c * greedy_loss.abs(),
        }
    }

    /// Verdict for one stage. Two infinite (diverged) losses count as a tie.
    pub fn verdict(self, greedy_loss: f64, baseline_loss: f64) -> StageComparison {
        let mut delta = baseline_loss - greedy_loss;
        if delta.is_nan() {
            delta = 0.0;
        }
        let star = self.insignificant(delta, greedy_loss);
        let verdict = match (delta > 0.0, star) {
            (true, false) => Verdict::Yes,
            (true, true) => Verdict::YesStar,
            (false, false) => Verdict::No,
            (false, true) => Verdict::NoStar,
        };
        StageComparison { delta, verdict }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageComparison {
    pub delta: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub stages: [StageComparison; 3],
    /// Classified on the mean of the three stage deltas.
    pub overall: StageComparison,
}

/// Identity of a paired run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub problem: String,
    pub noise: String,
    pub seed: u64,
}

pub fn classify(greedy: &RunSummary, baseline: &RunSummary, cutoff: Cutoff) -> ComparisonVerdict {
    let stages: [StageComparison; 3] =
        std::array::from_fn(|k| cutoff.verdict(greedy.stage_losses[k], baseline.stage_losses[k]));
    let mean_delta = stages.iter().map(|s| s.delta).sum::<f64>() / 3.0;
    let mean_greedy = greedy.stage_losses.iter().sum::<f64>() / 3.0;
    let overall = cutoff.verdict(mean_greedy, mean_greedy + mean_delta);
    ComparisonVerdict {
        stages,
        overall: StageComparison {
            delta: mean_delta,
            verdict: overall.verdict,
        },
    }
}

/// [`classify`] after checking that both runs share problem, noise and seed.
pub fn classify_paired(
    greedy: (&PairKey, &RunSummary),
    baseline: (&PairKey, &RunSummary),
    cutoff: Cutoff,
) -> Result<ComparisonVerdict> {
    if greedy.0 != baseline.0 {
        return Err(Error::Pairing(format!(
            "{:?} is not paired with {:?}",
            greedy.0, baseline.0
        )));
    }
    Ok(classify(greedy.1, baseline.1, cutoff))
}

/// Tallies of stage verdicts over many paired comparisons.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerdictCounts {
    pub yes: usize,
    pub yes_star: usize,
    pub no: usize,
    pub no_star: usize,
    pub pairs: usize,
    /// Pairs whose final-stage verdict is starred.
    pub final_within_cutoff: usize,
    /// As-good-or-better count per stage.
    pub stage_as_good_or_better: [usize; 3],
    deltas: Vec<f64>,
}

impl VerdictCounts {
    pub fn add(&mut self, v: &ComparisonVerdict) {
        self.pairs += 1;
        for (k, s) in v.stages.iter().enumerate() {
            self.add_stage(s.verdict);
            if s.verdict.as_good_or_better() {
                self.stage_as_good_or_better[k] += 1;
            }
            self.deltas.push(s.delta);
        }
        if v.stages[2].verdict.is_starred() {
            self.final_within_cutoff += 1;
        }
    }

    fn add_stage(&mut self, verdict: Verdict) {
        match verdict {
            Verdict::Yes => self.yes += 1,
            Verdict::YesStar => self.yes_star += 1,
            Verdict::No => self.no += 1,
            Verdict::NoStar => self.no_star += 1,
        }
    }

    /// Builds tallies directly from verdict counts, e.g. a published table.
    pub fn from_counts(yes: usize, yes_star: usize, no: usize, no_star: usize) -> Self {
        Self {
            yes,
            yes_star,
            no,
            no_star,
            ..Self::default()
        }
    }

    pub fn total(&self) -> usize {
        self.yes + self.yes_star + self.no + self.no_star
    }

    fn pct(&self, count: usize) -> f64 {
        100.0 * count as f64 / self.total() as f64
    }

    /// `yes + yes* + no*` as a percentage of all stage verdicts.
    pub fn as_good_or_better_pct(&self) -> f64 {
        self.pct(self.yes + self.yes_star + self.no_star)
    }

    /// `yes + yes*`.
    pub fn better_pct(&self) -> f64 {
        self.pct(self.yes + self.yes_star)
    }

    /// `no`.
    pub fn worse_pct(&self) -> f64 {
        self.pct(self.no)
    }

    /// `yes* + no*`.
    pub fn as_good_pct(&self) -> f64 {
        self.pct(self.yes_star + self.no_star)
    }

    /// `yes`.
    pub fn clearly_better_pct(&self) -> f64 {
        self.pct(self.yes)
    }

    pub fn stage_as_good_or_better_pct(&self) -> [f64; 3] {
        self.stage_as_good_or_better
            .map(|c| 100.0 * c as f64 / self.pairs as f64)
    }

    fn finite_deltas(&self) -> impl Iterator<Item = f64> + '_ {
        self.deltas.iter().copied().filter(|d| d.is_finite())
    }

    /// Mean `baseline − greedy` over all finite stage deltas.
    pub fn average_benefit(&self) -> f64 {
        let (sum, n) = self
            .finite_deltas()
            .fold((0.0, 0usize), |(s, n), d| (s + d, n + 1));
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }

    pub fn max_benefit(&self) -> f64 {
        self.finite_deltas().fold(f64::NAN, f64::max)
    }

    pub fn max_deficit(&self) -> f64 {
        self.finite_deltas().fold(f64::NAN, f64::min)
    }
}
