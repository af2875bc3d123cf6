#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wrvc::chart::MetricAtPoint;
use wrvc::linalg::Matrix;
use wrvc::Jet;

/// Binomial coefficient by the multiplicative formula, real upper argument.
pub fn choose(top: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (top - i as f64) / (i as f64 + 1.0);
    }
    c
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-scale..scale);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let b = random_symmetric(rng, n, 0.5);
    &b * &b + Matrix::identity(n, n) * 0.6
}

pub fn random_jet(rng: &mut ChaCha8Rng, dim: usize, order: usize, scale: f64) -> Jet {
    let len = wrvc::jet::coefficient_count(dim, order);
    let coeffs = (0..len).map(|_| rng.gen_range(-scale..scale)).collect();
    Jet::from_coeffs(dim, order, coeffs).unwrap()
}

/// `e^{2u}(δ + ε h(x))` with random quadratic `u` and linear symmetric `h`.
pub fn random_metric(rng: &mut ChaCha8Rng, point: &[f64], order: usize) -> MetricAtPoint {
    let n = point.len();
    let x = Jet::variables(point, order).unwrap();
    let mut u = x[0].constant_like(rng.gen_range(-0.3..0.3));
    for i in 0..n {
        u = &u + &x[i].scale(rng.gen_range(-0.4..0.4));
        for j in 0..=i {
            u = &u + &(&x[i] * &x[j]).scale(rng.gen_range(-0.3..0.3));
        }
    }
    let e = u.scale(2.0).exp();
    let mut rows = vec![vec![x[0].constant_like(0.0); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut h = x[0].constant_like(if i == j { 1.0 } else { 0.0 });
            for xk in &x {
                h = &h + &xk.scale(rng.gen_range(-0.1..0.1));
            }
            let c = &e * &h;
            rows[i][j] = c.clone();
            rows[j][i] = c;
        }
    }
    MetricAtPoint::new(rows, point.to_vec()).unwrap()
}

/// Coefficient-wise absolute value, for rounding-error scales.
pub fn abs_jet(a: &Jet) -> Jet {
    Jet::from_coeffs(a.dim(), a.order(), a.coeffs().iter().map(|c| c.abs()).collect()).unwrap()
}

pub fn jet_strategy(dim: usize, order: usize) -> impl Strategy<Value = Jet> {
    let len = wrvc::jet::coefficient_count(dim, order);
    proptest::collection::vec(-1.0f64..1.0, len)
        .prop_map(move |c| Jet::from_coeffs(dim, order, c).unwrap())
}

pub fn shape_strategy() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4, 0usize..=4)
}
