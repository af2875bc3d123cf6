//! Riemannian quantities on a coordinate chart from jet-valued metric components.
//!
//! Sign convention: `R_{ijkl} = ⟨R(∂_i, ∂_j)∂_l, ∂_k⟩` with
//! `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, and `Ric_ij = g^{kl} R_{kilj}`.
//! The unit round sphere then has `Ric = (n−1)g` and `R = n(n−1)`.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, Matrix};

/// A metric on a chart, given by jets of its components about one point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    n: usize,
    components: Vec<Jet>,
    point: Vec<f64>,
}

impl MetricAtPoint {
    /// `g[i][j]` must be symmetric coefficient-wise with a positive definite value.
    pub fn new(g: Vec<Vec<Jet>>, point: Vec<f64>) -> Result<Self> {
        let n = g.len();
        if n == 0 || point.len() != n {
            return Err(Error::DimensionMismatch(point.len(), n));
        }
        let mut components = Vec::with_capacity(n * n);
        for row in g {
            if row.len() != n {
                return Err(Error::DimensionMismatch(row.len(), n));
            }
            for c in row {
                if c.dim() != n {
                    return Err(Error::DimensionMismatch(c.dim(), n));
                }
                components.push(c);
            }
        }
        let metric = MetricAtPoint {
            n,
            components,
            point,
        };
        let scale = metric
            .components
            .iter()
            .flat_map(|c| c.coeffs().iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            for j in 0..i {
                if metric.get(i, j).max_abs_diff(metric.get(j, i)) > 1e-12 * scale {
                    return Err(Error::invalid(format!(
                        "metric is not symmetric in components ({i},{j})"
                    )));
                }
            }
        }
        if !linalg::is_positive_definite(&metric.value()) {
            return Err(Error::invalid("metric value is not positive definite"));
        }
        Ok(metric)
    }

    /// The metric `factor · δ_ij`.
    pub fn conformally_flat(factor: Jet, point: Vec<f64>) -> Result<Self> {
        let n = factor.dim();
        let zero = factor.constant_like(0.0);
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { factor.clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        MetricAtPoint::new(g, point)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest jet order among the components.
    pub fn order(&self) -> usize {
        self.components.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.components[i * self.n + j]
    }

    pub fn value(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j).value())
    }

    pub fn inverse_value(&self) -> Result<Matrix> {
        linalg::inverse(&self.value())
    }

    pub fn det_value(&self) -> f64 {
        linalg::det(&self.value())
    }

    /// Determinant as a jet.
    pub fn det_jet(&self) -> Jet {
        let n = self.n;
        // Leibniz expansion; n <= 4 keeps this at 24 terms.
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = self.get(0, 0).constant_like(0.0);
        permutations(&mut perm, 0, &mut |p, sign| {
            let mut term = self.get(0, p[0]).clone();
            for (i, &pi) in p.iter().enumerate().skip(1) {
                term = &term * self.get(i, pi);
            }
            total = &total + &term.scale(sign);
        });
        total
    }

    /// Every component multiplied by the scalar jet `factor`.
    pub fn scaled(&self, factor: &Jet) -> MetricAtPoint {
        MetricAtPoint {
            n: self.n,
            components: self.components.iter().map(|c| c * factor).collect(),
            point: self.point.clone(),
        }
    }

    fn require_order(&self, needed: usize) -> Result<()> {
        let available = self.order();
        if available < needed {
            return Err(Error::InsufficientOrder { needed, available });
        }
        Ok(())
    }

    fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        self.get(i, j).d1(k)
    }

    fn ddg(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.get(i, j).d2(k, l)
    }
}

fn permutations(p: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize], f64)) {
    fn go(p: &mut Vec<usize>, start: usize, sign: f64, visit: &mut impl FnMut(&[usize], f64)) {
        if start == p.len() {
            visit(p, sign);
            return;
        }
        for i in start..p.len() {
            p.swap(start, i);
            go(p, start + 1, if i == start { sign } else { -sign }, visit);
            p.swap(start, i);
        }
    }
    go(p, start, 1.0, visit);
}

/// Christoffel symbols `Γ^k_{ij}` at the base point, with the inverse metric.
#[derive(Debug, Clone)]
pub struct Christoffel {
    n: usize,
    ginv: Matrix,
    values: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[(k * self.n + i) * self.n + j]
    }

    pub fn inverse_metric(&self) -> &Matrix {
        &self.ginv
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn christoffel(g: &MetricAtPoint) -> Result<Christoffel> {
    g.require_order(1)?;
    let n = g.dim();
    let ginv = g.inverse_value()?;
    let mut values = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (g.dg(i, j, l) + g.dg(j, i, l) - g.dg(l, i, j));
                }
                values[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { n, ginv, values })
}

/// Riemann, Ricci and scalar curvature at the base point.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    n: usize,
    pub christoffel: Christoffel,
    riemann: Vec<f64>,
    pub ricci: Matrix,
    pub scalar: f64,
}

impl CurvatureBundle {
    /// `R_{ijkl}`.
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Largest violation of the algebraic Riemann symmetries and the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.riemann(i, j, k, l);
                        worst = worst
                            .max((r + self.riemann(j, i, k, l)).abs())
                            .max((r + self.riemann(i, j, l, k)).abs())
                            .max((r - self.riemann(k, l, i, j)).abs())
                            .max(
                                (r + self.riemann(i, k, l, j) + self.riemann(i, l, j, k)).abs(),
                            );
                    }
                }
            }
        }
        worst
    }
}

pub fn curvature(g: &MetricAtPoint) -> Result<CurvatureBundle> {
    g.require_order(2)?;
    let n = g.dim();
    let gam = christoffel(g)?;
    let ginv = gam.ginv.clone();
    let gv = g.value();

    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let mut dginv = vec![0.0; n * n * n];
    for m in 0..n {
        let dgm = Matrix::from_fn(n, n, |a, b| g.dg(m, a, b));
        let prod = -(&ginv * dgm * &ginv);
        for k in 0..n {
            for l in 0..n {
                dginv[(m * n + k) * n + l] = prod[(k, l)];
            }
        }
    }

    // ∂_m Γ^k_{ij}
    let idx4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let mut dgamma = vec![0.0; n * n * n * n];
    for m in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        let first = 0.5 * (g.dg(i, j, l) + g.dg(j, i, l) - g.dg(l, i, j));
                        let dfirst = 0.5
                            * (g.ddg(m, i, j, l) + g.ddg(m, j, i, l) - g.ddg(m, l, i, j));
                        s += dginv[(m * n + k) * n + l] * first + ginv[(k, l)] * dfirst;
                    }
                    dgamma[idx4(m, k, i, j)] = s;
                }
            }
        }
    }

    // R^a_{bcd}: component of R(∂_c, ∂_d)∂_b
    let mut rup = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = dgamma[idx4(c, a, d, b)] - dgamma[idx4(d, a, c, b)];
                    for e in 0..n {
                        s += gam.get(a, c, e) * gam.get(e, d, b) - gam.get(a, d, e) * gam.get(e, c, b);
                    }
                    rup[idx4(a, b, c, d)] = s;
                }
            }
        }
    }

    // R_{ijkl} = g_{ka} R^a_{lij}
    let mut riemann = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    riemann[idx4(i, j, k, l)] =
                        (0..n).map(|a| gv[(k, a)] * rup[idx4(a, l, i, j)]).sum();
                }
            }
        }
    }

    let ricci = linalg::symmetrize(&Matrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                s += ginv[(k, l)] * riemann[idx4(k, i, l, j)];
            }
        }
        s
    }));
    let scalar = linalg::trace_with(&ginv, &ricci);
    Ok(CurvatureBundle {
        n,
        christoffel: gam,
        riemann,
        ricci,
        scalar,
    })
}

fn check_scalar(u: &Jet, n: usize, needed: usize) -> Result<()> {
    if u.dim() != n {
        return Err(Error::DimensionMismatch(u.dim(), n));
    }
    if u.order() < needed {
        return Err(Error::InsufficientOrder {
            needed,
            available: u.order(),
        });
    }
    Ok(())
}

pub fn gradient(u: &Jet) -> Vec<f64> {
    (0..u.dim()).map(|i| u.d1(i)).collect()
}

/// `(∇²u)_ij = ∂_i∂_j u − Γ^k_{ij}∂_k u` using precomputed symbols.
pub fn hessian_with(u: &Jet, gam: &Christoffel) -> Result<Matrix> {
    let n = gam.dim();
    check_scalar(u, n, 2)?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        let mut h = u.d2(i, j);
        for k in 0..n {
            h -= gam.get(k, i, j) * u.d1(k);
        }
        h
    }))
}

pub fn hessian(u: &Jet, g: &MetricAtPoint) -> Result<Matrix> {
    hessian_with(u, &christoffel(g)?)
}

pub fn laplacian_with(u: &Jet, gam: &Christoffel) -> Result<f64> {
    Ok(linalg::trace_with(&gam.ginv, &hessian_with(u, gam)?))
}

pub fn laplacian(u: &Jet, g: &MetricAtPoint) -> Result<f64> {
    laplacian_with(u, &christoffel(g)?)
}

/// `⟨∇u, ∇v⟩ = g^{ij} ∂_i u ∂_j v`.
pub fn inner_grad_with(u: &Jet, v: &Jet, ginv: &Matrix) -> Result<f64> {
    let n = ginv.nrows();
    check_scalar(u, n, 1)?;
    check_scalar(v, n, 1)?;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += ginv[(i, j)] * u.d1(i) * v.d1(j);
        }
    }
    Ok(s)
}

pub fn grad_norm2(u: &Jet, g: &MetricAtPoint) -> Result<f64> {
    inner_grad_with(u, u, &g.inverse_value()?)
}

/// `Δ_φ u = Δu − ⟨∇φ, ∇u⟩`.
pub fn weighted_laplacian_with(u: &Jet, phi: &Jet, gam: &Christoffel) -> Result<f64> {
    Ok(laplacian_with(u, gam)? - inner_grad_with(phi, u, &gam.ginv)?)
}

pub fn weighted_laplacian(u: &Jet, phi: &Jet, g: &MetricAtPoint) -> Result<f64> {
    weighted_laplacian_with(u, phi, &christoffel(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vars(p: &[f64], order: usize) -> Vec<Jet> {
        Jet::variables(p, order).unwrap()
    }

    fn euclidean(p: &[f64]) -> MetricAtPoint {
        let x = vars(p, 4);
        MetricAtPoint::conformally_flat(x[0].constant_like(1.0), p.to_vec()).unwrap()
    }

    fn stereographic_sphere(p: &[f64]) -> MetricAtPoint {
        let x = vars(p, 4);
        let r2 = x.iter().fold(x[0].constant_like(0.0), |acc, xi| &acc + &(xi * xi));
        let factor = (r2 + 1.0).powf(-2.0).unwrap().scale(4.0);
        MetricAtPoint::conformally_flat(factor, p.to_vec()).unwrap()
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let g = euclidean(&[0.3, -0.2, 1.0]);
        let c = curvature(&g).unwrap();
        assert!(c.christoffel.values.iter().all(|v| *v == 0.0));
        assert!(linalg::max_abs(&c.ricci) == 0.0);
        assert_eq!(c.scalar, 0.0);
    }

    #[test]
    fn exponential_conformal_christoffels() {
        let x = vars(&[0.0, 0.0], 3);
        let g = MetricAtPoint::conformally_flat(x[0].scale(2.0).exp(), vec![0.0, 0.0]).unwrap();
        let gam = christoffel(&g).unwrap();
        assert_relative_eq!(gam.get(0, 0, 0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(gam.get(0, 1, 1), -1.0, epsilon = 1e-14);
        assert_relative_eq!(gam.get(1, 0, 1), 1.0, epsilon = 1e-14);
        assert_relative_eq!(gam.get(1, 1, 0), 1.0, epsilon = 1e-14);
        assert_eq!(gam.get(1, 0, 0), 0.0);
        assert_eq!(gam.get(1, 1, 1), 0.0);
        assert_eq!(gam.get(0, 0, 1), 0.0);
    }

    #[test]
    fn sphere_in_colatitude_longitude() {
        // g = dθ² + sin²θ dϕ² at θ = π/3
        let theta = std::f64::consts::FRAC_PI_3;
        let x = vars(&[theta, 0.0], 3);
        let s = x[0].sin();
        let one = x[0].constant_like(1.0);
        let zero = x[0].constant_like(0.0);
        let g = MetricAtPoint::new(
            vec![vec![one, zero.clone()], vec![zero, &s * &s]],
            vec![theta, 0.0],
        )
        .unwrap();
        let gam = christoffel(&g).unwrap();
        assert_relative_eq!(gam.get(0, 1, 1), -(3f64.sqrt() / 4.0), epsilon = 1e-14);
        let c = curvature(&g).unwrap();
        assert_relative_eq!(c.scalar, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_three_sphere_stereographic() {
        let g = stereographic_sphere(&[0.1, 0.0, 0.0]);
        let c = curvature(&g).unwrap();
        let gv = g.value();
        assert!(linalg::max_abs(&(&c.ricci - &gv * 2.0)) < 1e-12);
        assert_relative_eq!(c.scalar, 6.0, epsilon = 1e-12);
        assert!(c.symmetry_defect() < 1e-10);
    }

    #[test]
    fn hyperbolic_plane() {
        let x = vars(&[0.0, 1.0], 3);
        let factor = (&x[1] * &x[1]).recip().unwrap();
        let g = MetricAtPoint::conformally_flat(factor, vec![0.0, 1.0]).unwrap();
        assert_relative_eq!(curvature(&g).unwrap().scalar, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn insufficient_order_is_reported() {
        let x = vars(&[0.0, 1.0], 1);
        let g = MetricAtPoint::conformally_flat(x[1].clone(), vec![0.0, 1.0]).unwrap();
        assert!(christoffel(&g).is_ok());
        assert!(matches!(
            curvature(&g),
            Err(Error::InsufficientOrder {
                needed: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn rejects_bad_metrics() {
        let x = vars(&[0.0, 0.0], 2);
        let one = x[0].constant_like(1.0);
        let asym = MetricAtPoint::new(
            vec![vec![one.clone(), x[0].clone()], vec![x[1].clone(), one.clone()]],
            vec![0.0, 0.0],
        );
        assert!(asym.is_err());
        let indefinite = MetricAtPoint::conformally_flat(one.scale(-1.0), vec![0.0, 0.0]);
        assert!(indefinite.is_err());
    }

    #[test]
    fn derivative_operators() {
        let p = [1.0, 0.0, 0.0];
        let g = euclidean(&p);
        let x = vars(&p, 3);
        let c = x[0].constant_like(7.0);
        assert_eq!(hessian(&c, &g).unwrap(), Matrix::zeros(3, 3));
        assert_eq!(laplacian(&c, &g).unwrap(), 0.0);
        assert_eq!(grad_norm2(&c, &g).unwrap(), 0.0);

        let r2 = x.iter().fold(x[0].constant_like(0.0), |a, xi| &a + &(xi * xi));
        let u = r2.scale(0.5);
        assert!(linalg::max_abs(&(hessian(&u, &g).unwrap() - Matrix::identity(3, 3))) < 1e-15);
        assert_relative_eq!(laplacian(&u, &g).unwrap(), 3.0);

        // φ = |x|²/2, u = x₁ at (1,0,0)
        assert_relative_eq!(weighted_laplacian(&x[0], &u, &g).unwrap(), -1.0);
    }

    #[test]
    fn determinant_jet_matches_value() {
        let g = stereographic_sphere(&[0.2, 0.1, -0.3]);
        assert_relative_eq!(g.det_jet().value(), g.det_value(), epsilon = 1e-14);
    }
}
