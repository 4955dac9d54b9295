use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::ProblemSpec;
use crate::rng::{stream, Stream};

/// Binary logistic regression, `f_i(w) = log(1 + exp(−y_i wᵀx_i))`.
///
/// Labels come from a random teacher direction with Gaussian margin noise, so
/// the data are nearly but not exactly separable and the minimizer is finite.
/// Feature scales are log-spaced over `[1/√κ, 1]` to give the Hessian a
/// condition number of roughly `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Logistic {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    l_max: f64,
}

const MARGIN_NOISE: f64 = 0.5;

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Logistic {
    pub(crate) fn generate(spec: &ProblemSpec) -> Self {
        let d = spec.dimension;
        let n = spec.components;
        let mut rng = stream(spec.seed, Stream::ProblemData);
        let scales: Vec<f64> = (0..d)
            .map(|k| {
                let frac = if d > 1 {
                    k as f64 / (d - 1) as f64
                } else {
                    0.0
                };
                spec.condition_number.powf(-0.5 * frac)
            })
            .collect();
        let teacher: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut features = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let x: Vec<f64> = scales
                .iter()
                .map(|s| s * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let margin: f64 = x.iter().zip(&teacher).map(|(a, b)| a * b).sum::<f64>()
                + MARGIN_NOISE * rng.sample::<f64, _>(StandardNormal);
            labels.push(if margin >= 0.0 { 1.0 } else { -1.0 });
            features.push(x);
        }

        let gram = DMatrix::from_fn(d, d, |r, c| {
            features.iter().map(|x| x[r] * x[c]).sum::<f64>() / (4.0 * n as f64)
        });
        let l_max = SymmetricEigen::new(gram).eigenvalues.max();
        Self {
            features,
            labels,
            l_max,
        }
    }

    pub(crate) fn default_start(&self, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, Stream::Init);
        (0..self.dimension())
            .map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.features[0].len()
    }

    pub fn n_components(&self) -> usize {
        self.features.len()
    }

    /// `λ_max(XᵀX / 4n)`.
    pub fn l_max_estimate(&self) -> f64 {
        self.l_max
    }

    pub(crate) fn eval(&self, i: usize, w: &[f64], grad: &mut [f64]) -> f64 {
        let x = &self.features[i];
        let y = self.labels[i];
        let z: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
        let coeff = -y * sigmoid(-y * z);
        for (g, xi) in grad.iter_mut().zip(x) {
            *g = coeff * xi;
        }
        softplus(-y * z)
    }
}
