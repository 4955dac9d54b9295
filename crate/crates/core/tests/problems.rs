use greedylr::problems::{Problem, ProblemKind, ProblemSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Largest per-coordinate `|a − b| / max(|a|, |b|, 1)` between the analytic
/// gradient and a central difference with step `h`.
fn fd_error(p: &Problem, i: usize, x: &[f64], h: f64) -> f64 {
    let (_, g) = p.eval_component(i, x).unwrap();
    let mut worst: f64 = 0.0;
    let mut y = x.to_vec();
    for k in 0..x.len() {
        y[k] = x[k] + h;
        let up = p.eval_component(i, &y).unwrap().0;
        y[k] = x[k] - h;
        let down = p.eval_component(i, &y).unwrap().0;
        y[k] = x[k];
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((g[k] - fd).abs() / g[k].abs().max(fd.abs()).max(1.0));
    }
    worst
}

fn all_kinds() -> Vec<Problem> {
    vec![
        Problem::new(&ProblemSpec::new(ProblemKind::QuadraticSum, 8, 16, 1)).unwrap(),
        Problem::new(&ProblemSpec::new(ProblemKind::Logistic, 6, 40, 2)).unwrap(),
        Problem::new(&ProblemSpec::new(ProblemKind::Mlp, 5, 20, 3)).unwrap(),
        Problem::new(&ProblemSpec::new(ProblemKind::Rosenbrock, 2, 1, 0)).unwrap(),
    ]
}

#[test]
fn gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for p in all_kinds() {
        for _ in 0..10 {
            let noise = gaussian(&mut rng, p.dimension());
            let x: Vec<f64> = p
                .initial_point()
                .iter()
                .zip(&noise)
                .map(|(a, b)| a + b)
                .collect();
            let i = rng.random_range(0..p.n_components());
            let err = fd_error(&p, i, &x, 1e-5);
            assert!(err < 1e-4, "{}: relative error {err}", p.kind());
        }
    }
}

#[test]
fn quadratic_smoothness_witness() {
    let p = Problem::new(&ProblemSpec {
        smoothness: 5.0,
        condition_number: 20.0,
        ..ProblemSpec::new(ProblemKind::QuadraticSum, 6, 10, 7)
    })
    .unwrap();
    let l = p.l_max().unwrap();
    assert!((l - 5.0).abs() < 1e-9);
    let q = p.quadratic_parts().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tight: f64 = 0.0;
    for i in 0..p.n_components() {
        for _ in 0..20 {
            let x = gaussian(&mut rng, 6);
            let y = gaussian(&mut rng, 6);
            let gx = p.eval_component(i, &x).unwrap().1;
            let gy = p.eval_component(i, &y).unwrap().1;
            let dg: f64 = gx
                .iter()
                .zip(&gy)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let dx: f64 = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(dg <= l * dx * (1.0 + 1e-12));
        }
        // Equality along the top eigenvector of the component attaining L.
        let eig = q.matrix(i).clone().symmetric_eigen();
        let top = eig.eigenvalues.imax();
        let v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
        let g0 = p.eval_component(i, &[0.0; 6]).unwrap().1;
        let gv = p.eval_component(i, &v).unwrap().1;
        let dg: f64 = g0
            .iter()
            .zip(&gv)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        tight = tight.max(dg);
    }
    assert!((tight - l).abs() < 1e-9, "tightest ratio {tight} vs L {l}");
}

#[test]
fn quadratic_optimum_is_a_minimum() {
    let p = Problem::new(&ProblemSpec::new(ProblemKind::QuadraticSum, 5, 12, 4)).unwrap();
    let x_star = p.x_star().unwrap();
    let f_star = p.f_star().unwrap();
    let (f, g) = p.eval_full(&x_star).unwrap();
    assert!((f - f_star).abs() < 1e-12);
    assert!(g.iter().all(|v| v.abs() < 1e-10));
    assert!(f_star >= 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let dir = gaussian(&mut rng, 5);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y: Vec<f64> = x_star
            .iter()
            .zip(&dir)
            .map(|(a, b)| a + 1e-3 * b / norm)
            .collect();
        assert!(p.eval_full(&y).unwrap().0 >= f_star);
    }
}

#[test]
fn eval_full_matches_closed_form() {
    let p = Problem::new(&ProblemSpec::new(ProblemKind::QuadraticSum, 4, 9, 11)).unwrap();
    let q = p.quadratic_parts().unwrap();
    let n = p.n_components() as f64;
    let mut a = DMatrix::zeros(4, 4);
    let mut b = DVector::zeros(4);
    let mut c = 0.0;
    for i in 0..p.n_components() {
        a += q.matrix(i);
        b += q.linear(i);
        c += q.constant(i);
    }
    a /= n;
    b /= n;
    c /= n;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let x = DVector::from_vec(gaussian(&mut rng, 4));
        let closed = 0.5 * x.dot(&(&a * &x)) - b.dot(&x) + c;
        let grad = &a * &x - &b;
        let (f, g) = p.eval_full(x.as_slice()).unwrap();
        assert!((f - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        for (u, v) in g.iter().zip(grad.iter()) {
            assert!((u - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }
}

#[test]
fn full_gradient_of_two_quadratics_is_the_mean() {
    let a1 = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let a2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
    let p = Problem::quadratic(vec![
        (a1, DVector::from_vec(vec![1.0, -1.0])),
        (a2, DVector::from_vec(vec![0.0, 2.0])),
    ])
    .unwrap();
    let x = [0.3, -0.7];
    let g1 = p.eval_component(0, &x).unwrap().1;
    let g2 = p.eval_component(1, &x).unwrap().1;
    let g = p.eval_full(&x).unwrap().1;
    for k in 0..2 {
        assert!((g[k] - 0.5 * (g1[k] + g2[k])).abs() < 1e-15);
    }
}

#[test]
fn identity_quadratic_example() {
    let p = Problem::quadratic(vec![(DMatrix::identity(2, 2), DVector::zeros(2))]).unwrap();
    assert_eq!(p.l_max(), Some(1.0));
    assert_eq!(p.f_star(), Some(0.0));
    assert_eq!(p.x_star(), Some(vec![0.0, 0.0]));
    assert_eq!(
        p.eval_component(0, &[1.0, 1.0]).unwrap(),
        (1.0, vec![1.0, 1.0])
    );
}

#[test]
fn same_seed_same_problem_for_every_kind() {
    for kind in [
        ProblemKind::QuadraticSum,
        ProblemKind::Logistic,
        ProblemKind::Mlp,
    ] {
        let spec = ProblemSpec::new(kind, 4, 8, 99);
        let (a, b) = (Problem::new(&spec).unwrap(), Problem::new(&spec).unwrap());
        assert_eq!(a.initial_point(), b.initial_point());
        let x = a.initial_point().to_vec();
        for i in 0..a.n_components() {
            let (la, ga) = a.eval_component(i, &x).unwrap();
            let (lb, gb) = b.eval_component(i, &x).unwrap();
            assert_eq!(la.to_bits(), lb.to_bits());
            assert_eq!(ga, gb);
        }
    }
}

#[test]
fn logistic_smoothness_estimate_bounds_curvature() {
    let p = Problem::new(&ProblemSpec::new(ProblemKind::Logistic, 5, 60, 8)).unwrap();
    let l = p.l_max().unwrap();
    // The full objective's Hessian is at most XᵀX/(4n); probe with gradient differences.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let x = gaussian(&mut rng, 5);
        let y = gaussian(&mut rng, 5);
        let gx = p.eval_full(&x).unwrap().1;
        let gy = p.eval_full(&y).unwrap().1;
        let dg: f64 = gx
            .iter()
            .zip(&gy)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let dx: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(dg <= l * dx * (1.0 + 1e-9));
    }
}
