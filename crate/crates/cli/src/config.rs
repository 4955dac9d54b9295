//! Harness configuration: a TOML document with one section per command.
//!
//! Every section has built-in defaults, so a config file only needs the keys
//! it wants to change (the `run` command is the exception: it needs an
//! explicit problem and scheduler). Unknown keys are rejected. The resolved
//! document, with every default filled in, is echoed to the output
//! directory as `config.resolved.toml`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use greedylr::noise::{NoiseKind, NoiseSpec};
use greedylr::optim::OptimizerKind;
use greedylr::problems::{ProblemKind, ProblemSpec};
use greedylr::runner::{
    BaselineTemplate, GreedyTemplate, GridProblem, GridSpec, RunConfig, SchedulerTemplate,
};
use greedylr::sched::{BaselineConfig, BaselineKind, GreedyConfig, Mode, SchedulerSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    pub format: Format,
    /// Worker threads for grids; output bytes do not depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robustness: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fsweep: Option<FSweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheorySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySection>,
}

impl HarnessConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("invalid config: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

/// Every scheduler kind the harness knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    Greedy,
    GreedySimple,
    Cosine,
    CosineRestarts,
    Exponential,
    Linear,
    Polynomial,
    ConstantWarmup,
}

impl SchedulerKind {
    fn baseline(self) -> Option<BaselineKind> {
        Some(match self {
            SchedulerKind::Greedy | SchedulerKind::GreedySimple => return None,
            SchedulerKind::Cosine => BaselineKind::Cosine,
            SchedulerKind::CosineRestarts => BaselineKind::CosineRestarts,
            SchedulerKind::Exponential => BaselineKind::Exponential,
            SchedulerKind::Linear => BaselineKind::Linear,
            SchedulerKind::Polynomial => BaselineKind::Polynomial,
            SchedulerKind::ConstantWarmup => BaselineKind::ConstantWarmup,
        })
    }
}

/// Keys accepted only by GreedyLR or only by baselines.
const GREEDY_ONLY: &[&str] = &[
    "factor",
    "patience",
    "threshold",
    "cooldown",
    "warmup",
    "max_lr",
    "eps",
    "smoothing",
    "window_size",
    "reset_start",
    "mode",
];
const BASELINE_ONLY: &[&str] = &["restart_period", "decay_rate", "power", "warmup_steps"];

fn reject_foreign(kind: SchedulerKind, set: &[(&'static str, bool)]) -> Result<()> {
    let foreign = if kind.baseline().is_some() {
        GREEDY_ONLY
    } else {
        BASELINE_ONLY
    };
    for (key, present) in set {
        if *present && foreign.contains(key) {
            bail!("scheduler key `{key}` does not apply to kind {kind:?}");
        }
    }
    Ok(())
}

/// A single scheduler with absolute learning rates (used by `run`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerSection {
    pub kind: SchedulerKind,
    pub initial_lr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooldown: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup_steps: Option<usize>,
}

impl SchedulerSection {
    pub fn to_spec(&self, total_steps: usize) -> Result<SchedulerSpec> {
        reject_foreign(
            self.kind,
            &[
                ("factor", self.factor.is_some()),
                ("patience", self.patience.is_some()),
                ("threshold", self.threshold.is_some()),
                ("cooldown", self.cooldown.is_some()),
                ("warmup", self.warmup.is_some()),
                ("max_lr", self.max_lr.is_some()),
                ("eps", self.eps.is_some()),
                ("smoothing", self.smoothing.is_some()),
                ("window_size", self.window_size.is_some()),
                ("reset_start", self.reset_start.is_some()),
                ("mode", self.mode.is_some()),
                ("restart_period", self.restart_period.is_some()),
                ("decay_rate", self.decay_rate.is_some()),
                ("power", self.power.is_some()),
                ("warmup_steps", self.warmup_steps.is_some()),
            ],
        )?;
        let spec = match self.kind.baseline() {
            None => {
                let d = GreedyConfig::new(self.initial_lr);
                let cfg = GreedyConfig {
                    factor: self.factor.unwrap_or(d.factor),
                    patience: self.patience.unwrap_or(d.patience),
                    threshold: self.threshold.unwrap_or(d.threshold),
                    cooldown: self.cooldown.unwrap_or(d.cooldown),
                    warmup: self.warmup.unwrap_or(d.warmup),
                    min_lr: self.min_lr.unwrap_or(d.min_lr),
                    max_lr: self.max_lr.unwrap_or(d.max_lr),
                    eps: self.eps.unwrap_or(d.eps),
                    smoothing: self.smoothing.unwrap_or(d.smoothing),
                    window_size: self.window_size.unwrap_or(d.window_size),
                    reset_start: self.reset_start.unwrap_or(d.reset_start),
                    mode: self.mode.unwrap_or(d.mode),
                    initial_lr: self.initial_lr,
                };
                if self.kind == SchedulerKind::GreedySimple {
                    SchedulerSpec::GreedySimple(cfg)
                } else {
                    SchedulerSpec::Greedy(cfg)
                }
            }
            Some(kind) => {
                let d = BaselineConfig::new(kind, self.initial_lr, total_steps);
                SchedulerSpec::Baseline(BaselineConfig {
                    min_lr: self.min_lr.unwrap_or(d.min_lr),
                    restart_period: self.restart_period.unwrap_or(d.restart_period),
                    decay_rate: self.decay_rate.unwrap_or(d.decay_rate),
                    power: self.power.unwrap_or(d.power),
                    warmup_steps: self.warmup_steps.unwrap_or(d.warmup_steps),
                    ..d
                })
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// This section with every applicable default written out.
    pub fn resolved(&self, total_steps: usize) -> Result<Self> {
        let base = Self {
            kind: self.kind,
            initial_lr: self.initial_lr,
            ..Self::bare(self.kind, self.initial_lr)
        };
        Ok(match self.to_spec(total_steps)? {
            SchedulerSpec::Greedy(c) | SchedulerSpec::GreedySimple(c) => Self {
                min_lr: Some(c.min_lr),
                factor: Some(c.factor),
                patience: Some(c.patience),
                threshold: Some(c.threshold),
                cooldown: Some(c.cooldown),
                warmup: Some(c.warmup),
                max_lr: Some(c.max_lr),
                eps: Some(c.eps),
                smoothing: Some(c.smoothing),
                window_size: Some(c.window_size),
                reset_start: Some(c.reset_start),
                mode: Some(c.mode),
                ..base
            },
            SchedulerSpec::Baseline(c) => Self {
                min_lr: Some(c.min_lr),
                restart_period: Some(c.restart_period),
                decay_rate: Some(c.decay_rate),
                power: Some(c.power),
                warmup_steps: Some(c.warmup_steps),
                ..base
            },
        })
    }

    pub fn bare(kind: SchedulerKind, initial_lr: f64) -> Self {
        Self {
            kind,
            initial_lr,
            min_lr: None,
            factor: None,
            patience: None,
            threshold: None,
            cooldown: None,
            warmup: None,
            max_lr: None,
            eps: None,
            smoothing: None,
            window_size: None,
            reset_start: None,
            mode: None,
            restart_period: None,
            decay_rate: None,
            power: None,
            warmup_steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::run_steps")]
    pub total_steps: usize,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    pub problem: ProblemSpec,
    pub scheduler: SchedulerSection,
    #[serde(default)]
    pub noise: NoiseSpec,
}

impl RunSection {
    pub fn to_config(&self) -> Result<RunConfig> {
        let cfg = RunConfig {
            optimizer: self.optimizer,
            noise: self.noise.clone(),
            total_steps: self.total_steps,
            seed: self.seed,
            ..RunConfig::new(
                self.problem.clone(),
                self.scheduler.to_spec(self.total_steps)?,
            )
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolved(&self) -> Result<Self> {
        Ok(Self {
            scheduler: self.scheduler.resolved(self.total_steps)?,
            ..self.clone()
        })
    }
}

/// A grid scheduler whose learning-rate bounds scale with each problem's
/// initial learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSection {
    pub kind: SchedulerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_lr_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lr_multiple: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooldown: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup_steps: Option<usize>,
}

impl TemplateSection {
    pub fn new(kind: SchedulerKind) -> Self {
        Self {
            kind,
            min_lr_fraction: None,
            max_lr_multiple: None,
            factor: None,
            patience: None,
            threshold: None,
            cooldown: None,
            warmup: None,
            eps: None,
            smoothing: None,
            window_size: None,
            reset_start: None,
            restart_period: None,
            decay_rate: None,
            power: None,
            warmup_steps: None,
        }
    }

    pub fn to_template(&self) -> Result<SchedulerTemplate> {
        let greedy_only = [
            ("max_lr_multiple", self.max_lr_multiple.is_some()),
            ("factor", self.factor.is_some()),
            ("patience", self.patience.is_some()),
            ("threshold", self.threshold.is_some()),
            ("cooldown", self.cooldown.is_some()),
            ("warmup", self.warmup.is_some()),
            ("eps", self.eps.is_some()),
            ("smoothing", self.smoothing.is_some()),
            ("window_size", self.window_size.is_some()),
            ("reset_start", self.reset_start.is_some()),
        ];
        let baseline_only = [
            ("restart_period", self.restart_period.is_some()),
            ("decay_rate", self.decay_rate.is_some()),
            ("power", self.power.is_some()),
            ("warmup_steps", self.warmup_steps.is_some()),
        ];
        let foreign: &[(&str, bool)] = if self.kind.baseline().is_some() {
            &greedy_only
        } else {
            &baseline_only
        };
        if let Some((key, _)) = foreign.iter().find(|(_, present)| *present) {
            bail!(
                "scheduler key `{key}` does not apply to kind {:?}",
                self.kind
            );
        }
        Ok(match self.kind.baseline() {
            None => {
                let d = GreedyTemplate::default();
                SchedulerTemplate::Greedy(GreedyTemplate {
                    factor: self.factor.unwrap_or(d.factor),
                    patience: self.patience.unwrap_or(d.patience),
                    threshold: self.threshold.unwrap_or(d.threshold),
                    cooldown: self.cooldown.unwrap_or(d.cooldown),
                    warmup: self.warmup.unwrap_or(d.warmup),
                    eps: self.eps.unwrap_or(d.eps),
                    smoothing: self.smoothing.unwrap_or(d.smoothing),
                    window_size: self.window_size.unwrap_or(d.window_size),
                    reset_start: self.reset_start.unwrap_or(d.reset_start),
                    min_lr_fraction: self.min_lr_fraction.unwrap_or(d.min_lr_fraction),
                    max_lr_multiple: self.max_lr_multiple.unwrap_or(d.max_lr_multiple),
                    simple: self.kind == SchedulerKind::GreedySimple,
                })
            }
            Some(kind) => {
                let d = BaselineTemplate::new(kind);
                SchedulerTemplate::Baseline(BaselineTemplate {
                    min_lr_fraction: self.min_lr_fraction.unwrap_or(d.min_lr_fraction),
                    restart_period: self.restart_period.or(d.restart_period),
                    decay_rate: self.decay_rate.unwrap_or(d.decay_rate),
                    power: self.power.unwrap_or(d.power),
                    warmup_steps: self.warmup_steps.unwrap_or(d.warmup_steps),
                    ..d
                })
            }
        })
    }

    pub fn resolved(&self) -> Result<Self> {
        let base = Self::new(self.kind);
        Ok(match self.to_template()? {
            SchedulerTemplate::Greedy(g) => Self {
                min_lr_fraction: Some(g.min_lr_fraction),
                max_lr_multiple: Some(g.max_lr_multiple),
                factor: Some(g.factor),
                patience: Some(g.patience),
                threshold: Some(g.threshold),
                cooldown: Some(g.cooldown),
                warmup: Some(g.warmup),
                eps: Some(g.eps),
                smoothing: Some(g.smoothing),
                window_size: Some(g.window_size),
                reset_start: Some(g.reset_start),
                ..base
            },
            SchedulerTemplate::Baseline(b) => Self {
                min_lr_fraction: Some(b.min_lr_fraction),
                restart_period: b.restart_period,
                decay_rate: Some(b.decay_rate),
                power: Some(b.power),
                warmup_steps: Some(b.warmup_steps),
                ..base
            },
        })
    }
}

/// A named grid problem. Generator keys are the same as in `[run.problem]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridProblemSection {
    pub name: String,
    pub initial_lr: f64,
    pub kind: ProblemKind,
    #[serde(default = "defaults::dimension")]
    pub dimension: usize,
    #[serde(default = "defaults::components")]
    pub components: usize,
    #[serde(default = "defaults::condition_number")]
    pub condition_number: f64,
    #[serde(default = "defaults::one")]
    pub smoothness: f64,
    #[serde(default = "defaults::one")]
    pub spread: f64,
    #[serde(default = "defaults::hidden")]
    pub hidden: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GridProblemSection {
    fn new(name: &str, kind: ProblemKind, initial_lr: f64) -> Self {
        let d = ProblemSpec::new(kind, defaults::dimension(), defaults::components(), 0);
        Self {
            name: name.into(),
            initial_lr,
            kind,
            dimension: d.dimension,
            components: d.components,
            condition_number: d.condition_number,
            smoothness: d.smoothness,
            spread: d.spread,
            hidden: d.hidden,
            seed: 0,
        }
    }

    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            kind: self.kind,
            dimension: self.dimension,
            components: self.components,
            condition_number: self.condition_number,
            smoothness: self.smoothness,
            spread: self.spread,
            hidden: self.hidden,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub total_steps: usize,
    pub seeds: Vec<u64>,
    pub optimizer: OptimizerKind,
    pub problem: Vec<GridProblemSection>,
    pub scheduler: Vec<TemplateSection>,
    pub noise: Vec<NoiseSpec>,
}

impl Default for GridSection {
    /// Six problems × five noises × five seeds × four schedulers = 600 runs.
    ///
    /// Each problem starts at a conservative learning rate of roughly
    /// `0.1 / λ`, with `λ` the largest Hessian eigenvalue of the full
    /// objective at the starting point (the exact `L` for quadratics).
    fn default() -> Self {
        use ProblemKind::*;
        let quad = |name, dimension, components, condition_number, seed| GridProblemSection {
            dimension,
            components,
            condition_number,
            spread: 0.1,
            seed,
            ..GridProblemSection::new(name, QuadraticSum, 0.1)
        };
        let mlp = |name, dimension, hidden, components, seed, lr| GridProblemSection {
            dimension,
            hidden,
            components,
            seed,
            ..GridProblemSection::new(name, Mlp, lr)
        };
        Self {
            total_steps: 200,
            seeds: (0..5).collect(),
            optimizer: OptimizerKind::Sgd,
            problem: vec![
                quad("quadratic_d8", 8, 32, 10.0, 1),
                quad("quadratic_d32", 32, 64, 100.0, 2),
                GridProblemSection {
                    dimension: 16,
                    components: 128,
                    seed: 3,
                    ..GridProblemSection::new("logistic_d16", Logistic, 0.3)
                },
                mlp("mlp_h8", 4, 8, 64, 4, 0.05),
                mlp("mlp_h32", 8, 32, 128, 5, 0.03),
                GridProblemSection::new("rosenbrock", Rosenbrock, 6.6e-5),
            ],
            scheduler: vec![
                TemplateSection::new(SchedulerKind::Greedy),
                TemplateSection::new(SchedulerKind::Cosine),
                TemplateSection::new(SchedulerKind::CosineRestarts),
                TemplateSection::new(SchedulerKind::Exponential),
            ],
            noise: vec![
                NoiseSpec::none(),
                NoiseSpec::new(NoiseKind::Gaussian, 0.1),
                NoiseSpec::new(NoiseKind::PeriodicSpike, 5.0),
                NoiseSpec::new(NoiseKind::RandomSpike, 5.0),
                NoiseSpec::new(NoiseKind::Adversarial, 1.0),
            ],
        }
    }
}

impl GridSection {
    pub fn to_spec(&self) -> Result<GridSpec> {
        let spec = GridSpec {
            problems: self
                .problem
                .iter()
                .map(|p| GridProblem {
                    name: p.name.clone(),
                    spec: p.spec(),
                    initial_lr: p.initial_lr,
                })
                .collect(),
            schedulers: self
                .scheduler
                .iter()
                .map(TemplateSection::to_template)
                .collect::<Result<_>>()?,
            noises: self.noise.clone(),
            seeds: self.seeds.clone(),
            total_steps: self.total_steps,
            optimizer: self.optimizer,
        };
        spec.validate()?;
        for p in &spec.problems {
            p.spec
                .validate()
                .with_context(|| format!("problem {}", p.name))?;
        }
        Ok(spec)
    }

    pub fn resolved(&self) -> Result<Self> {
        Ok(Self {
            scheduler: self
                .scheduler
                .iter()
                .map(TemplateSection::resolved)
                .collect::<Result<_>>()?,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FSweepSection {
    pub factors: Vec<f64>,
    pub seeds: Vec<u64>,
    pub total_steps: usize,
    pub optimizer: OptimizerKind,
    pub initial_lr: f64,
    pub problem: ProblemSpec,
    /// Must be `greedy` or `greedy_simple`; its `factor` is swept.
    pub scheduler: TemplateSection,
    pub noise: NoiseSpec,
}

impl Default for FSweepSection {
    /// The default MLP at roughly `1/λ`, ten times the grid's conservative rate.
    fn default() -> Self {
        Self {
            factors: vec![0.25, 0.5, 0.75, 0.99],
            seeds: (0..5).collect(),
            total_steps: 250,
            optimizer: OptimizerKind::Sgd,
            initial_lr: 0.3,
            problem: ProblemSpec::new(ProblemKind::Mlp, 8, 64, 0),
            scheduler: TemplateSection::new(SchedulerKind::Greedy),
            noise: NoiseSpec::none(),
        }
    }
}

impl FSweepSection {
    pub fn to_config(&self) -> Result<RunConfig> {
        let template = self.scheduler.to_template()?;
        if !matches!(template, SchedulerTemplate::Greedy(_)) {
            bail!("fsweep scheduler must be greedy or greedy_simple");
        }
        for &f in &self.factors {
            if !(f > 0.0 && f < 1.0) {
                bail!("fsweep factor {f} must lie in (0, 1)");
            }
        }
        let cfg = RunConfig {
            optimizer: self.optimizer,
            total_steps: self.total_steps,
            ..RunConfig::new(
                self.problem.clone(),
                template.instantiate(self.initial_lr, self.total_steps),
            )
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolved(&self) -> Result<Self> {
        Ok(Self {
            scheduler: self.scheduler.resolved()?,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheorySection {
    pub problem: ProblemSpec,
    /// `true` runs the two-branch GreedyLR rule, `false` the full controller.
    pub simple: bool,
    /// Learning-rate bounds and start in units of `1/L`.
    pub min_lr_inv_l: f64,
    pub max_lr_inv_l: f64,
    pub initial_lr_inv_l: f64,
    pub factor: f64,
    pub ladder: Vec<usize>,
    pub seeds: Vec<u64>,
    pub factors: Vec<f64>,
    pub factor_steps: usize,
    pub factor_seeds: Vec<u64>,
}

impl Default for TheorySection {
    fn default() -> Self {
        Self {
            problem: ProblemSpec {
                smoothness: 2.0,
                ..ProblemSpec::new(ProblemKind::QuadraticSum, 8, 32, 0)
            },
            simple: true,
            min_lr_inv_l: 0.1,
            max_lr_inv_l: 1.0,
            initial_lr_inv_l: 0.5,
            factor: 0.95,
            ladder: vec![100, 1000, 10000],
            seeds: (0..20).collect(),
            factors: vec![0.1, 0.3, 0.5, 0.7, 0.9, 0.99],
            factor_steps: 1000,
            factor_seeds: (0..10).collect(),
        }
    }
}

impl TheorySection {
    /// The scheduler with bounds resolved against the problem's `L`.
    pub fn scheduler(&self, l: f64) -> SchedulerSpec {
        let cfg = GreedyConfig {
            factor: self.factor,
            min_lr: self.min_lr_inv_l / l,
            max_lr: self.max_lr_inv_l / l,
            ..GreedyConfig::new(self.initial_lr_inv_l / l)
        };
        if self.simple {
            SchedulerSpec::GreedySimple(cfg)
        } else {
            SchedulerSpec::Greedy(cfg)
        }
    }
}

/// Pairing and cutoff settings for `classify`; flags take precedence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    /// Scheduler taken from the first file. When absent, the first file must
    /// hold exactly one scheduler, or one named `greedy`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy_scheduler: Option<String>,
    /// Schedulers taken from the second file; empty means all of them except
    /// the GreedyLR scheduler (or all of them if that leaves none).
    pub baseline_schedulers: Vec<String>,
    pub cutoff: f64,
    /// Compare `|delta|` with `cutoff·|greedy_loss|` instead of `cutoff`.
    pub relative: bool,
}

impl Default for ClassifySection {
    fn default() -> Self {
        Self {
            greedy_scheduler: None,
            baseline_schedulers: Vec::new(),
            cutoff: 0.1,
            relative: false,
        }
    }
}

mod defaults {
    pub fn run_steps() -> usize {
        200
    }
    pub fn dimension() -> usize {
        8
    }
    pub fn components() -> usize {
        32
    }
    pub fn condition_number() -> f64 {
        10.0
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn hidden() -> usize {
        16
    }
}
