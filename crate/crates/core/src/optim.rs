//! First-order optimizers over flat parameter vectors.
//!
//! Steps never fail on numerical blow-up: a non-finite gradient or iterate is
//! reported as [`StepStatus::Diverged`] so the caller can record it.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub step: usize,
}

impl Iterate {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, step: 0 }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Sgd,
    Adam,
}

fn check(x: &Iterate, g: &[f64], lr: f64) -> Result<()> {
    if g.len() != x.x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.x.len(),
            got: g.len(),
        });
    }
    if !(lr >= 0.0 && lr.is_finite()) {
        return invalid(format!(
            "learning rate must be finite and nonnegative, got {lr}"
        ));
    }
    Ok(())
}

fn status(x: &Iterate, g: &[f64]) -> StepStatus {
    if x.is_finite() && g.iter().all(|v| v.is_finite()) {
        StepStatus::Ok
    } else {
        StepStatus::Diverged
    }
}

/// `x ← x − lr·g`.
pub fn sgd_step(x: &mut Iterate, g: &[f64], lr: f64) -> Result<StepStatus> {
    check(x, g, lr)?;
    for (xi, gi) in x.x.iter_mut().zip(g) {
        *xi -= lr * gi;
    }
    x.step += 1;
    Ok(status(x, g))
}

/// Adam moments with bias correction. No weight decay.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(dim: usize) -> Self {
        Self::with_params(dim, 0.9, 0.999, 1e-8)
    }

    pub fn with_params(dim: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        assert!((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2));
        Self {
            beta1,
            beta2,
            eps,
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            t: 0,
        }
    }

    pub fn step(&mut self, x: &mut Iterate, g: &[f64], lr: f64) -> Result<StepStatus> {
        check(x, g, lr)?;
        if self.first_moment.len() != x.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.first_moment.len(),
                got: x.x.len(),
            });
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        let moments = self
            .first_moment
            .iter_mut()
            .zip(self.second_moment.iter_mut());
        for ((xi, &gi), (m, v)) in x.x.iter_mut().zip(g).zip(moments) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * gi;
            *v = self.beta2 * *v + (1.0 - self.beta2) * gi * gi;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *xi -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        x.step += 1;
        Ok(status(x, g))
    }
}

/// An optimizer instance owned by one run.
#[derive(Debug, Clone, PartialEq)]
pub enum Optimizer {
    Sgd,
    Adam(Adam),
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, dim: usize) -> Self {
        match kind {
            OptimizerKind::Sgd => Optimizer::Sgd,
            OptimizerKind::Adam => Optimizer::Adam(Adam::new(dim)),
        }
    }

    pub fn step(&mut self, x: &mut Iterate, g: &[f64], lr: f64) -> Result<StepStatus> {
        match self {
            Optimizer::Sgd => sgd_step(x, g, lr),
            Optimizer::Adam(adam) => adam.step(x, g, lr),
        }
    }
}
