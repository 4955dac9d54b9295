use rand::Rng;
use rand_distr::StandardNormal;

use super::ProblemSpec;
use crate::rng::{stream, Stream};

/// Scalar regression with a one-hidden-layer tanh network,
/// `f_i(θ) = ½(w₂ᵀ tanh(W₁x_i + b₁) + b₂ − y_i)²`.
///
/// Targets come from a random teacher network of the same shape plus a little
/// Gaussian noise. Parameters are flattened as `[W₁ (row-major), b₁, w₂, b₂]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    inputs: usize,
    hidden: usize,
    features: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

const TARGET_NOISE: f64 = 0.1;

struct Layout {
    w1: std::ops::Range<usize>,
    b1: std::ops::Range<usize>,
    w2: std::ops::Range<usize>,
    b2: usize,
}

impl Mlp {
    fn layout(&self) -> Layout {
        let (p, h) = (self.inputs, self.hidden);
        Layout {
            w1: 0..h * p,
            b1: h * p..h * p + h,
            w2: h * p + h..h * p + 2 * h,
            b2: h * p + 2 * h,
        }
    }

    fn init_params(inputs: usize, hidden: usize, gain: f64, rng: &mut impl Rng) -> Vec<f64> {
        let mut theta = Vec::with_capacity(hidden * inputs + 2 * hidden + 1);
        let s1 = gain / (inputs as f64).sqrt();
        let s2 = gain / (hidden as f64).sqrt();
        theta.extend((0..hidden * inputs).map(|_| s1 * rng.sample::<f64, _>(StandardNormal)));
        theta.extend(std::iter::repeat_n(0.0, hidden));
        theta.extend((0..hidden).map(|_| s2 * rng.sample::<f64, _>(StandardNormal)));
        theta.push(0.0);
        theta
    }

    pub(crate) fn generate(spec: &ProblemSpec) -> Self {
        let (p, h, n) = (spec.dimension, spec.hidden, spec.components);
        let mut rng = stream(spec.seed, Stream::ProblemData);
        let mut net = Self {
            inputs: p,
            hidden: h,
            features: Vec::with_capacity(n),
            targets: Vec::with_capacity(n),
        };
        let teacher = Self::init_params(p, h, 2.0, &mut rng);
        let mut hidden_buf = vec![0.0; h];
        for _ in 0..n {
            let x: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            let y = net.forward(&teacher, &x, &mut hidden_buf)
                + TARGET_NOISE * rng.sample::<f64, _>(StandardNormal);
            net.features.push(x);
            net.targets.push(y);
        }
        net
    }

    pub(crate) fn default_start(&self, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, Stream::Init);
        Self::init_params(self.inputs, self.hidden, 1.0, &mut rng)
    }

    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + 2 * self.hidden + 1
    }

    pub fn n_components(&self) -> usize {
        self.features.len()
    }

    /// Network output; leaves the hidden activations in `hidden`.
    fn forward(&self, theta: &[f64], x: &[f64], hidden: &mut [f64]) -> f64 {
        let l = self.layout();
        let w1 = &theta[l.w1];
        let b1 = &theta[l.b1];
        let w2 = &theta[l.w2];
        let mut out = theta[l.b2];
        for j in 0..self.hidden {
            let row = &w1[j * self.inputs..(j + 1) * self.inputs];
            let a: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b1[j];
            hidden[j] = a.tanh();
            out += w2[j] * hidden[j];
        }
        out
    }

    pub(crate) fn eval(&self, i: usize, theta: &[f64], grad: &mut [f64]) -> f64 {
        let x = &self.features[i];
        let mut hidden = vec![0.0; self.hidden];
        let err = self.forward(theta, x, &mut hidden) - self.targets[i];

        let l = self.layout();
        let p = self.inputs;
        for j in 0..self.hidden {
            let w2j = theta[l.w2.start + j];
            grad[l.w2.start + j] = err * hidden[j];
            let delta = err * w2j * (1.0 - hidden[j] * hidden[j]);
            grad[l.b1.start + j] = delta;
            for k in 0..p {
                grad[l.w1.start + j * p + k] = delta * x[k];
            }
        }
        grad[l.b2] = err;
        0.5 * err * err
    }
}
