use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::ProblemSpec;
use crate::error::{invalid, Result};
use crate::rng::{stream, Stream};

/// `f_i(x) = ½xᵀA_ix − b_iᵀx + c_i` with symmetric PSD `A_i`.
///
/// Generated instances use `b_i = A_i z_i` and `c_i = ½z_iᵀA_iz_i`, so each
/// component is `½(x − z_i)ᵀA_i(x − z_i) ≥ 0`. The constants do not change
/// gradients or minimizers; they only keep losses nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSum {
    a: Vec<DMatrix<f64>>,
    b: Vec<DVector<f64>>,
    c: Vec<f64>,
    l_max: f64,
    x_star: Vec<f64>,
    f_star: f64,
}

fn random_orthogonal(d: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Sign-fix columns so the distribution is Haar rather than QR-biased.
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

impl QuadraticSum {
    pub(crate) fn generate(spec: &ProblemSpec) -> Self {
        let d = spec.dimension;
        let n = spec.components;
        let hi = spec.smoothness;
        let lo = hi / spec.condition_number;
        let mut rng = stream(spec.seed, Stream::ProblemData);

        let mut spectra: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let u: f64 = rng.random();
                        (lo.ln() + u * (hi.ln() - lo.ln())).exp()
                    })
                    .collect()
            })
            .collect();
        // Pin both ends of the pooled spectrum so L_max and the condition
        // number are exact.
        spectra[0][0] = hi;
        if d >= 2 {
            spectra[0][1] = lo;
        } else if n >= 2 {
            spectra[1][0] = lo;
        }

        let centre: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut parts = Vec::with_capacity(n);
        let mut consts = Vec::with_capacity(n);
        for spectrum in &spectra {
            let q = random_orthogonal(d, &mut rng);
            let a =
                &q * DMatrix::from_diagonal(&DVector::from_vec(spectrum.clone())) * q.transpose();
            let a = (&a + a.transpose()) * 0.5;
            let z = DVector::from_fn(d, |k, _| {
                centre[k] + spec.spread * rng.sample::<f64, _>(StandardNormal)
            });
            let b = &a * &z;
            consts.push(0.5 * z.dot(&b));
            parts.push((a, b));
        }
        Self::assemble(parts, consts).expect("generated quadratic is positive definite")
    }

    pub(crate) fn from_parts(parts: Vec<(DMatrix<f64>, DVector<f64>)>) -> Result<Self> {
        if parts.is_empty() {
            return invalid("quadratic sum needs at least one component");
        }
        let d = parts[0].0.nrows();
        for (a, b) in &parts {
            if a.nrows() != d || a.ncols() != d || b.len() != d {
                return invalid("all components must share one square dimension");
            }
            if (a - a.transpose()).amax() > 1e-12 * (1.0 + a.amax()) {
                return invalid("component matrices must be symmetric");
            }
        }
        let n = parts.len();
        Self::assemble(parts, vec![0.0; n])
    }

    fn assemble(parts: Vec<(DMatrix<f64>, DVector<f64>)>, c: Vec<f64>) -> Result<Self> {
        let n = parts.len();
        let d = parts[0].0.nrows();
        let mut l_max = f64::NEG_INFINITY;
        let mut a_bar = DMatrix::zeros(d, d);
        let mut b_bar = DVector::zeros(d);
        for (a, b) in &parts {
            let eig = SymmetricEigen::new(a.clone());
            if eig.eigenvalues.min() < -1e-10 * (1.0 + eig.eigenvalues.amax()) {
                return invalid("component matrices must be positive semidefinite");
            }
            l_max = l_max.max(eig.eigenvalues.max());
            a_bar += a;
            b_bar += b;
        }
        a_bar /= n as f64;
        b_bar /= n as f64;
        let c_bar = c.iter().sum::<f64>() / n as f64;
        let Some(chol) = a_bar.clone().cholesky() else {
            return invalid("averaged matrix must be positive definite to define x*");
        };
        let x_star = chol.solve(&b_bar);
        let f_star = 0.5 * x_star.dot(&(&a_bar * &x_star)) - b_bar.dot(&x_star) + c_bar;
        let (a, b) = parts.into_iter().unzip();
        Ok(Self {
            a,
            b,
            c,
            l_max,
            x_star: x_star.as_slice().to_vec(),
            f_star,
        })
    }

    pub(crate) fn default_start(&self, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, Stream::Init);
        self.x_star
            .iter()
            .map(|x| x + rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.b[0].len()
    }

    pub fn n_components(&self) -> usize {
        self.a.len()
    }

    /// `max_i λ_max(A_i)`.
    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    pub fn matrix(&self, i: usize) -> &DMatrix<f64> {
        &self.a[i]
    }

    pub fn linear(&self, i: usize) -> &DVector<f64> {
        &self.b[i]
    }

    pub fn constant(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub(crate) fn eval(&self, i: usize, x: &[f64], grad: &mut [f64]) -> f64 {
        let a = &self.a[i];
        let b = &self.b[i];
        let d = x.len();
        let mut quad = 0.0;
        let mut lin = 0.0;
        for r in 0..d {
            let mut ax = 0.0;
            for k in 0..d {
                ax += a[(r, k)] * x[k];
            }
            grad[r] = ax - b[r];
            quad += x[r] * ax;
            lin += b[r] * x[r];
        }
        0.5 * quad - lin + self.c[i]
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use nalgebra::{DMatrix, DVector, SymmetricEigen};

    #[test]
    fn identity_components() {
        let parts = vec![(DMatrix::identity(2, 2), DVector::zeros(2)); 3];
        let p = Problem::quadratic(parts).unwrap();
        assert_eq!(p.l_max(), Some(1.0));
        assert_eq!(p.f_star(), Some(0.0));
        assert_eq!(p.x_star(), Some(vec![0.0, 0.0]));
        let (loss, grad) = p.eval_component(0, &[1.0, 1.0]).unwrap();
        assert_eq!(loss, 1.0);
        assert_eq!(grad, vec![1.0, 1.0]);
    }

    #[test]
    fn generated_spectrum_matches_condition_number() {
        let spec = ProblemSpec {
            smoothness: 3.0,
            condition_number: 10.0,
            ..ProblemSpec::new(ProblemKind::QuadraticSum, 2, 6, 9)
        };
        let p = Problem::new(&spec).unwrap();
        let q = p.quadratic_parts().unwrap();
        let mut all = Vec::new();
        for i in 0..q.n_components() {
            all.extend(
                SymmetricEigen::new(q.matrix(i).clone())
                    .eigenvalues
                    .iter()
                    .copied(),
            );
        }
        let max = all.iter().cloned().fold(f64::MIN, f64::max);
        let min = all.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max / min - 10.0).abs() < 1e-9);
        assert!((p.l_max().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_pins_second_component() {
        let spec = ProblemSpec {
            smoothness: 2.0,
            condition_number: 4.0,
            ..ProblemSpec::new(ProblemKind::QuadraticSum, 1, 2, 1)
        };
        let p = Problem::new(&spec).unwrap();
        let q = p.quadratic_parts().unwrap();
        assert!((q.matrix(0)[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((q.matrix(1)[(0, 0)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_symmetric_parts_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(Problem::quadratic(vec![(a, DVector::zeros(2))]).is_err());
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Problem::quadratic(vec![(a, DVector::zeros(2))]).is_err());
    }

    #[test]
    fn interpolating_instance_has_zero_optimum() {
        let spec = ProblemSpec {
            spread: 0.0,
            ..ProblemSpec::new(ProblemKind::QuadraticSum, 4, 8, 2)
        };
        let p = Problem::new(&spec).unwrap();
        assert!(p.f_star().unwrap().abs() < 1e-12);
        let x_star = p.x_star().unwrap();
        for i in 0..8 {
            let (_, g) = p.eval_component(i, &x_star).unwrap();
            assert!(g.iter().all(|v| v.abs() < 1e-10));
        }
    }
}
