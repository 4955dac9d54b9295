//! Finite-sum objectives `f(x) = (1/n) Σ f_i(x)` with exact per-component
//! losses and gradients.
//!
//! Problems are generated from a seed and are immutable afterwards, so one
//! instance can be shared by any number of concurrent runs.

mod logistic;
mod mlp;
mod quadratic;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use logistic::Logistic;
pub use mlp::Mlp;
pub use quadratic::QuadraticSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    QuadraticSum,
    Logistic,
    Mlp,
    Rosenbrock,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::QuadraticSum => "quadratic_sum",
            ProblemKind::Logistic => "logistic",
            ProblemKind::Mlp => "mlp",
            ProblemKind::Rosenbrock => "rosenbrock",
        })
    }
}

/// Generator parameters of a problem.
///
/// `dimension` is the iterate dimension for quadratics and logistic
/// regression, and the input feature count for the MLP (whose iterate is the
/// flattened weight vector). Rosenbrock ignores sizes and is always 2-D with
/// one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    #[serde(default = "defaults::dimension")]
    pub dimension: usize,
    #[serde(default = "defaults::components")]
    pub components: usize,
    #[serde(default = "defaults::condition_number")]
    pub condition_number: f64,
    /// Largest component eigenvalue of a quadratic sum.
    #[serde(default = "defaults::smoothness")]
    pub smoothness: f64,
    /// Spread of the per-component minimizers of a quadratic sum; zero gives
    /// an interpolating problem where every component shares one minimizer.
    #[serde(default = "defaults::spread")]
    pub spread: f64,
    /// Hidden width of the MLP.
    #[serde(default = "defaults::hidden")]
    pub hidden: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn dimension() -> usize {
        8
    }
    pub fn components() -> usize {
        32
    }
    pub fn condition_number() -> f64 {
        10.0
    }
    pub fn smoothness() -> f64 {
        1.0
    }
    pub fn spread() -> f64 {
        1.0
    }
    pub fn hidden() -> usize {
        16
    }
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, dimension: usize, components: usize, seed: u64) -> Self {
        Self {
            kind,
            dimension,
            components,
            condition_number: defaults::condition_number(),
            smoothness: defaults::smoothness(),
            spread: defaults::spread(),
            hidden: defaults::hidden(),
            seed,
        }
    }

    /// Default short label, e.g. `quadratic_sum_d8`.
    pub fn label(&self) -> String {
        match self.kind {
            ProblemKind::Rosenbrock => "rosenbrock".to_string(),
            kind => format!("{kind}_d{}", self.dimension),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ProblemKind::Rosenbrock {
            return Ok(());
        }
        if self.dimension == 0 || self.dimension > 64 {
            return invalid(format!(
                "dimension must be in 1..=64, got {}",
                self.dimension
            ));
        }
        if self.components == 0 {
            return invalid("components must be positive");
        }
        if !(self.condition_number >= 1.0 && self.condition_number.is_finite()) {
            return invalid(format!(
                "condition_number must be >= 1, got {}",
                self.condition_number
            ));
        }
        if !(self.smoothness > 0.0 && self.smoothness.is_finite()) {
            return invalid(format!(
                "smoothness must be positive, got {}",
                self.smoothness
            ));
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return invalid(format!("spread must be nonnegative, got {}", self.spread));
        }
        if self.kind == ProblemKind::Mlp && (self.hidden == 0 || self.hidden > 32) {
            return invalid(format!(
                "hidden width must be in 1..=32, got {}",
                self.hidden
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Objective {
    Quadratic(QuadraticSum),
    Logistic(Logistic),
    Mlp(Mlp),
    Rosenbrock,
}

/// A generated finite-sum problem with its starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    spec: ProblemSpec,
    objective: Objective,
    x0: Vec<f64>,
}

/// Builds a problem of `kind` with the remaining generator parameters at
/// their defaults.
pub fn make_problem(
    kind: ProblemKind,
    dimension: usize,
    n_components: usize,
    condition_number: f64,
    seed: u64,
) -> Result<Problem> {
    Problem::new(&ProblemSpec {
        condition_number,
        ..ProblemSpec::new(kind, dimension, n_components, seed)
    })
}

impl Problem {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let (objective, x0) = match spec.kind {
            ProblemKind::QuadraticSum => {
                let q = QuadraticSum::generate(spec);
                let x0 = q.default_start(spec.seed);
                (Objective::Quadratic(q), x0)
            }
            ProblemKind::Logistic => {
                let l = Logistic::generate(spec);
                let x0 = l.default_start(spec.seed);
                (Objective::Logistic(l), x0)
            }
            ProblemKind::Mlp => {
                let m = Mlp::generate(spec);
                let x0 = m.default_start(spec.seed);
                (Objective::Mlp(m), x0)
            }
            ProblemKind::Rosenbrock => (Objective::Rosenbrock, vec![-1.2, 1.0]),
        };
        Ok(Self {
            spec: spec.clone(),
            objective,
            x0,
        })
    }

    /// A quadratic sum from explicit parts `f_i(x) = ½xᵀA_ix − b_iᵀx`.
    pub fn quadratic(parts: Vec<(nalgebra::DMatrix<f64>, nalgebra::DVector<f64>)>) -> Result<Self> {
        let q = QuadraticSum::from_parts(parts)?;
        let d = q.dimension();
        let spec = ProblemSpec {
            spread: 0.0,
            ..ProblemSpec::new(ProblemKind::QuadraticSum, d, q.n_components(), 0)
        };
        Ok(Self {
            spec,
            objective: Objective::Quadratic(q),
            x0: vec![1.0; d],
        })
    }

    /// Replaces the default starting point.
    pub fn with_start(mut self, x0: Vec<f64>) -> Result<Self> {
        self.check_dim(&x0)?;
        self.x0 = x0;
        Ok(self)
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn kind(&self) -> ProblemKind {
        self.spec.kind
    }

    /// Iterate dimension.
    pub fn dimension(&self) -> usize {
        match &self.objective {
            Objective::Quadratic(q) => q.dimension(),
            Objective::Logistic(l) => l.dimension(),
            Objective::Mlp(m) => m.n_params(),
            Objective::Rosenbrock => 2,
        }
    }

    pub fn n_components(&self) -> usize {
        match &self.objective {
            Objective::Quadratic(q) => q.n_components(),
            Objective::Logistic(l) => l.n_components(),
            Objective::Mlp(m) => m.n_components(),
            Objective::Rosenbrock => 1,
        }
    }

    /// Smoothness constant: exact for quadratic sums, the standard
    /// `λ_max(XᵀX / 4n)` estimate for logistic regression, absent otherwise.
    pub fn l_max(&self) -> Option<f64> {
        match &self.objective {
            Objective::Quadratic(q) => Some(q.l_max()),
            Objective::Logistic(l) => Some(l.l_max_estimate()),
            _ => None,
        }
    }

    /// Optimal value, when known exactly.
    pub fn f_star(&self) -> Option<f64> {
        match &self.objective {
            Objective::Quadratic(q) => Some(q.f_star()),
            Objective::Rosenbrock => Some(0.0),
            _ => None,
        }
    }

    pub fn x_star(&self) -> Option<Vec<f64>> {
        match &self.objective {
            Objective::Quadratic(q) => Some(q.x_star().to_vec()),
            Objective::Rosenbrock => Some(vec![1.0, 1.0]),
            _ => None,
        }
    }

    pub fn initial_point(&self) -> &[f64] {
        &self.x0
    }

    pub fn quadratic_parts(&self) -> Option<&QuadraticSum> {
        match &self.objective {
            Objective::Quadratic(q) => Some(q),
            _ => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Loss of component `i` (0-based) at `x`, writing its gradient into `grad`.
    pub fn eval_component_into(&self, i: usize, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        if i >= self.n_components() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n_components(),
            });
        }
        self.check_dim(x)?;
        if grad.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: grad.len(),
            });
        }
        Ok(match &self.objective {
            Objective::Quadratic(q) => q.eval(i, x, grad),
            Objective::Logistic(l) => l.eval(i, x, grad),
            Objective::Mlp(m) => m.eval(i, x, grad),
            Objective::Rosenbrock => rosenbrock(x, grad),
        })
    }

    /// `(f_i(x), ∇f_i(x))` for component `i` (0-based).
    pub fn eval_component(&self, i: usize, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut grad = vec![0.0; x.len()];
        let loss = self.eval_component_into(i, x, &mut grad)?;
        Ok((loss, grad))
    }

    /// `(f(x), ∇f(x))`, the arithmetic mean over all components.
    pub fn eval_full(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim(x)?;
        let n = self.n_components();
        let mut grad = vec![0.0; x.len()];
        let mut scratch = vec![0.0; x.len()];
        let mut loss = 0.0;
        for i in 0..n {
            loss += self.eval_component_into(i, x, &mut scratch)?;
            for (g, s) in grad.iter_mut().zip(&scratch) {
                *g += s;
            }
        }
        let inv = 1.0 / n as f64;
        grad.iter_mut().for_each(|g| *g *= inv);
        Ok((loss * inv, grad))
    }
}

/// `(1 − x)² + 100(y − x²)²`.
fn rosenbrock(x: &[f64], grad: &mut [f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let r = b - a * a;
    grad[0] = -2.0 * (1.0 - a) - 400.0 * a * r;
    grad[1] = 200.0 * r;
    (1.0 - a).powi(2) + 100.0 * r * r
}
