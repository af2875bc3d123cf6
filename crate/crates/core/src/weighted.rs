//! Weighted curvature of a smooth metric measure space at a point.
//!
//! With `φ = −m ln f` the weighted volume is `f^m dvol_g = e^{−φ} dvol_g` and
//!
//! ```text
//! Ric_φ = Ric + ∇²φ − (1/m) dφ⊗dφ
//! R_φ   = R + 2Δφ − ((m+1)/m)|∇φ|² + m(m−1)μ e^{2φ/m}
//! J     = R_φ / (2(n+m−1))
//! P     = (Ric_φ − J g) / (n+m−2)
//! Y     = J − tr_g P
//! ```
//!
//! When `m = 0` the density must be identically one, `φ ≡ 0`, every `1/m`
//! term is dropped and `Y := 0`; this reproduces the classical Schouten
//! tensor and scalar.

use crate::chart::{self, CurvatureBundle, MetricAtPoint};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, Matrix};

const UNIT_DENSITY_TOL: f64 = 1e-12;

/// `(g, f, m, μ)` expanded about one chart point.
#[derive(Debug, Clone)]
pub struct MetricMeasurePoint {
    g: MetricAtPoint,
    f: Jet,
    m: f64,
    mu: f64,
}

impl MetricMeasurePoint {
    pub fn new(g: MetricAtPoint, f: Jet, m: f64, mu: f64) -> Result<Self> {
        let n = g.dim();
        if f.dim() != n {
            return Err(Error::DimensionMismatch(f.dim(), n));
        }
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::invalid(format!("dimensional parameter m = {m} must be >= 0")));
        }
        if !mu.is_finite() {
            return Err(Error::invalid("curvature parameter mu must be finite"));
        }
        if n as f64 + m <= 2.0 {
            return Err(Error::invalid(format!(
                "n + m = {} must exceed 2 (the Schouten normalization divides by n+m-2)",
                n as f64 + m
            )));
        }
        if m == 0.0 {
            if f.max_abs_diff(&f.constant_like(1.0)) > UNIT_DENSITY_TOL {
                return Err(Error::invalid("m = 0 requires the density f to be identically 1"));
            }
        } else if !(f.value() > 0.0) {
            return Err(Error::domain(format!("density must be positive, got f = {}", f.value())));
        }
        Ok(MetricMeasurePoint { g, f, m, mu })
    }

    pub fn metric(&self) -> &MetricAtPoint {
        &self.g
    }

    pub fn density(&self) -> &Jet {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `n + m`.
    pub fn total_dim(&self) -> f64 {
        self.dim() as f64 + self.m
    }

    /// `φ = −m ln f` (zero when `m = 0`).
    pub fn phi(&self) -> Result<Jet> {
        if self.m == 0.0 {
            return Ok(self.f.constant_like(0.0));
        }
        Ok(self.f.ln()?.scale(-self.m))
    }

    fn order(&self) -> usize {
        self.g.order().min(self.f.order())
    }
}

/// Weighted curvature quantities at the base point.
#[derive(Debug, Clone)]
pub struct WeightedInvariants {
    pub ric_phi: Matrix,
    pub r_phi: f64,
    pub schouten: Matrix,
    pub j: f64,
    pub y: f64,
    pub f_phi: f64,
    pub metric: Matrix,
    pub metric_inv: Matrix,
    pub n: usize,
    pub m: f64,
}

impl WeightedInvariants {
    /// `|P|² = g^{ik} g^{jl} P_ij P_kl`.
    pub fn schouten_norm2(&self) -> f64 {
        linalg::contract(&self.metric_inv, &self.schouten, &self.schouten)
    }

    pub fn schouten_trace(&self) -> f64 {
        linalg::trace_with(&self.metric_inv, &self.schouten)
    }
}

pub fn weighted_invariants(p: &MetricMeasurePoint) -> Result<WeightedInvariants> {
    let available = p.order();
    if available < 2 {
        return Err(Error::InsufficientOrder {
            needed: 2,
            available,
        });
    }
    let n = p.dim();
    let m = p.m;
    let curv = chart::curvature(&p.g)?;
    let gam = &curv.christoffel;
    let ginv = gam.inverse_metric().clone();
    let gv = p.g.value();

    let (ric_phi, r_phi) = if m == 0.0 {
        (curv.ricci.clone(), curv.scalar)
    } else {
        let phi = p.phi()?;
        let hess = chart::hessian_with(&phi, gam)?;
        let dphi = chart::gradient(&phi);
        let dd = Matrix::from_fn(n, n, |i, j| dphi[i] * dphi[j]);
        let ric_phi = &curv.ricci + &hess - dd / m;
        let lap = linalg::trace_with(&ginv, &hess);
        let grad2 = chart::inner_grad_with(&phi, &phi, &ginv)?;
        // e^{2φ/m} = f^{−2}
        let fv = p.f.value();
        let r_phi =
            curv.scalar + 2.0 * lap - (m + 1.0) / m * grad2 + m * (m - 1.0) * p.mu / (fv * fv);
        (ric_phi, r_phi)
    };

    let total = n as f64 + m;
    let j = r_phi / (2.0 * (total - 1.0));
    let schouten = linalg::symmetrize(&((&ric_phi - &gv * j) / (total - 2.0)));
    let y = if m == 0.0 {
        0.0
    } else {
        j - linalg::trace_with(&ginv, &schouten)
    };

    let f_phi = {
        let lap_f = chart::laplacian_with(&p.f, gam)?;
        let grad_f = chart::inner_grad_with(&p.f, &p.f, &ginv)?;
        p.f.value() * lap_f + (m - 1.0) * (grad_f - p.mu)
    };

    Ok(WeightedInvariants {
        ric_phi: linalg::symmetrize(&ric_phi),
        r_phi,
        schouten,
        j,
        y,
        f_phi,
        metric: gv,
        metric_inv: ginv,
        n,
        m,
    })
}

/// `Ric − (m/f)∇²f`, an independent route to `Ric_φ`.
pub fn ric_phi_alternate(p: &MetricMeasurePoint) -> Result<Matrix> {
    if !(p.m > 0.0) {
        return Err(Error::invalid("the density route to Ric_phi needs m > 0"));
    }
    let fv = p.f.value();
    if !(fv > 0.0) {
        return Err(Error::domain(format!("density must be positive, got {fv}")));
    }
    let curv: CurvatureBundle = chart::curvature(&p.g)?;
    let hess_f = chart::hessian_with(&p.f, &curv.christoffel)?;
    Ok(linalg::symmetrize(&(&curv.ricci - hess_f * (p.m / fv))))
}

/// How a conformal factor acts on `(g, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `(e^{2ω} g, e^{ω} f)`.
    Standard,
    /// `(e^{−2ω/(n+m−2)} g, e^{−ω/(n+m−2)} f)`.
    Weighted,
}

#[derive(Debug, Clone)]
pub struct ConformalDeformation {
    pub omega: Jet,
    pub convention: Convention,
}

impl ConformalDeformation {
    pub fn standard(omega: Jet) -> Self {
        ConformalDeformation {
            omega,
            convention: Convention::Standard,
        }
    }

    pub fn weighted(omega: Jet) -> Self {
        ConformalDeformation {
            omega,
            convention: Convention::Weighted,
        }
    }

    /// The exponent `σ` of the standard form `(e^{2σ} g, e^{σ} f)`.
    pub fn standard_exponent(&self, total_dim: f64) -> Jet {
        match self.convention {
            Convention::Standard => self.omega.clone(),
            Convention::Weighted => self.omega.scale(-1.0 / (total_dim - 2.0)),
        }
    }

    /// The same deformation expressed in the other convention.
    pub fn converted(&self, total_dim: f64) -> Self {
        match self.convention {
            Convention::Standard => ConformalDeformation::weighted(self.omega.scale(-(total_dim - 2.0))),
            Convention::Weighted => ConformalDeformation::standard(self.standard_exponent(total_dim)),
        }
    }
}

/// Applies `(e^{2σ} g, e^{σ} f)`; `m` and `μ` are unchanged. For `m = 0` the
/// density stays identically one.
pub fn conformal_rescale(p: &MetricMeasurePoint, d: &ConformalDeformation) -> MetricMeasurePoint {
    let sigma = d.standard_exponent(p.total_dim());
    let e = sigma.exp();
    let g = p.g.scaled(&(&e * &e));
    let f = if p.m == 0.0 {
        p.f.clone()
    } else {
        &p.f * &e
    };
    MetricMeasurePoint {
        g,
        f,
        m: p.m,
        mu: p.mu,
    }
}

/// Residuals of the weighted transformation laws of `J`, `P`, `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalLawResiduals {
    pub j: f64,
    pub schouten: f64,
    pub y: f64,
}

impl ConformalLawResiduals {
    pub fn max(&self) -> f64 {
        self.j.max(self.schouten).max(self.y)
    }
}

/// Compares direct re-evaluation on `(e^{−2ω/(n+m−2)} g, e^{−ω/(n+m−2)} f)` with
///
/// ```text
/// e^{−2ω/(n+m−2)} Ĵ = J + c (Δ_φω − ½|∇ω|²)
/// P̂                 = P + c (∇²ω + (1/(n+m−2)) dω⊗dω − (1/(2(n+m−2)))|∇ω|² g)
/// e^{−2ω/(n+m−2)} Ŷ = Y + c (−⟨∇φ,∇ω⟩ − (m/(2(n+m−2)))|∇ω|²)
/// ```
///
/// with `c = 1/(n+m−2)`.
pub fn check_conformal_laws(p: &MetricMeasurePoint, omega: &Jet) -> Result<ConformalLawResiduals> {
    let c = 1.0 / (p.total_dim() - 2.0);
    conformal_law_residuals(p, omega, c)
}

/// Same comparison with an arbitrary coefficient `c` in front of the `ω` terms.
pub fn conformal_law_residuals(
    p: &MetricMeasurePoint,
    omega: &Jet,
    c: f64,
) -> Result<ConformalLawResiduals> {
    if omega.order() < 2 {
        return Err(Error::InsufficientOrder {
            needed: 2,
            available: omega.order(),
        });
    }
    let n = p.dim();
    let k = 1.0 / (p.total_dim() - 2.0);
    let base = weighted_invariants(p)?;
    let hat = weighted_invariants(&conformal_rescale(
        p,
        &ConformalDeformation::weighted(omega.clone()),
    ))?;

    let gam = chart::christoffel(&p.g)?;
    let ginv = gam.inverse_metric();
    let phi = p.phi()?;
    let lap_phi = chart::weighted_laplacian_with(omega, &phi, &gam)?;
    let grad2 = chart::inner_grad_with(omega, omega, ginv)?;
    let phi_dot = chart::inner_grad_with(&phi, omega, ginv)?;
    let hess = chart::hessian_with(omega, &gam)?;
    let dw = chart::gradient(omega);
    let scale = (-2.0 * k * omega.value()).exp();

    let j_rhs = base.j + c * (lap_phi - 0.5 * grad2);
    let p_rhs = &base.schouten
        + (&hess + Matrix::from_fn(n, n, |i, j| k * dw[i] * dw[j]) - &base.metric * (0.5 * k * grad2))
            * c;
    let y_rhs = base.y + c * (-phi_dot - 0.5 * p.m * k * grad2);

    Ok(ConformalLawResiduals {
        j: (scale * hat.j - j_rhs).abs(),
        schouten: linalg::max_abs(&(&hat.schouten - p_rhs)),
        y: (scale * hat.y - y_rhs).abs(),
    })
}

/// `σ_k` of `values`, by the standard one-pass recurrence.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in values {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e[k]
}

/// `σ_j(g⁻¹P)` for `j = 0..=k` from power traces via Newton's identities.
fn sigma_of_endomorphism(a: &Matrix, k: usize) -> Vec<f64> {
    let n = a.nrows();
    let mut power_sums = vec![0.0; k + 1];
    let mut pw = Matrix::identity(n, n);
    for p in power_sums.iter_mut().skip(1) {
        pw = &pw * a;
        *p = pw.trace();
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for j in 1..=k {
        let mut s = 0.0;
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * e[j - i] * power_sums[i];
        }
        e[j] = s / j as f64;
    }
    e
}

/// Generalized binomial coefficient `m(m−1)⋯(m−j+1)/j!`.
pub fn binomial(m: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m - i as f64) / (i as f64 + 1.0))
}

/// Weighted `σ_k`: `Σ_j C(m, j) (Y/m)^j σ_{k−j}(g⁻¹P)`, valid for every real `m ≥ 0`.
pub fn sigma_k_phi(y: f64, p: &Matrix, g: &Matrix, m: f64, k: usize) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::invalid(format!("m = {m} must be >= 0")));
    }
    let a = linalg::inverse(g)? * p;
    let sig = sigma_of_endomorphism(&a, k);
    if m == 0.0 {
        return Ok(sig[k]);
    }
    let ratio = y / m;
    Ok((0..=k)
        .map(|j| binomial(m, j) * ratio.powi(j as i32) * sig[k - j])
        .sum())
}

/// Weighted `σ_k` for integer `m` as the elementary symmetric polynomial of
/// `{Y/m (m times)} ∪ spec(g⁻¹P)`.
pub fn sigma_k_phi_multiset(y: f64, p: &Matrix, g: &Matrix, m: usize, k: usize) -> Result<f64> {
    let mut values = linalg::relative_eigenvalues(g, p)?;
    if m > 0 {
        values.extend(std::iter::repeat_n(y / m as f64, m));
    }
    Ok(elementary_symmetric(&values, k))
}

/// `v₁ = J`, `v₂ = ½[J² − |P|² − Y²/m]` (the last term is zero when `m = 0`).
pub fn v1_v2_closed_form(w: &WeightedInvariants, m: f64) -> (f64, f64) {
    let y_term = if m == 0.0 { 0.0 } else { w.y * w.y / m };
    (w.j, 0.5 * (w.j * w.j - w.schouten_norm2() - y_term))
}

/// `λ = J/(n+m)` and `max(‖P − λg‖_∞, |tr_g P − nλ|)`.
pub fn quasi_einstein_residual(w: &WeightedInvariants, g: &Matrix, n: usize, m: f64) -> (f64, f64) {
    let lambda = w.j / (n as f64 + m);
    let off = linalg::max_abs(&(&w.schouten - g * lambda));
    let tr = (w.schouten_trace() - n as f64 * lambda).abs();
    (lambda, off.max(tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere_point(p: &[f64], order: usize) -> MetricAtPoint {
        let x = Jet::variables(p, order).unwrap();
        let r2 = x.iter().fold(x[0].constant_like(0.0), |a, xi| &a + &(xi * xi));
        let factor = (r2 + 1.0).powf(-2.0).unwrap().scale(4.0);
        MetricAtPoint::conformally_flat(factor, p.to_vec()).unwrap()
    }

    fn flat_point(p: &[f64], order: usize) -> MetricAtPoint {
        let x = Jet::variables(p, order).unwrap();
        MetricAtPoint::conformally_flat(x[0].constant_like(1.0), p.to_vec()).unwrap()
    }

    fn qe_sphere() -> MetricMeasurePoint {
        let g = sphere_point(&[0.1, 0.2, 0.0], 4);
        let f = g.get(0, 0).constant_like(0.5f64.sqrt());
        MetricMeasurePoint::new(g, f, 2.0, 1.0).unwrap()
    }

    #[test]
    fn flat_structure_has_zero_invariants() {
        let g = flat_point(&[0.0, 0.0, 0.0], 4);
        let f = g.get(0, 0).constant_like(1.0);
        let w = weighted_invariants(&MetricMeasurePoint::new(g, f, 2.0, 0.0).unwrap()).unwrap();
        assert_eq!(linalg::max_abs(&w.ric_phi), 0.0);
        assert_eq!(w.r_phi, 0.0);
        assert_eq!(linalg::max_abs(&w.schouten), 0.0);
        assert_eq!(w.j, 0.0);
        assert_eq!(w.y, 0.0);
    }

    #[test]
    fn quasi_einstein_sphere_values() {
        let p = qe_sphere();
        let w = weighted_invariants(&p).unwrap();
        let g = p.metric().value();
        assert!(linalg::max_abs(&(&w.ric_phi - &g * 2.0)) < 1e-12);
        assert_relative_eq!(w.r_phi, 10.0, epsilon = 1e-12);
        assert_relative_eq!(w.j, 1.25, epsilon = 1e-12);
        assert!(linalg::max_abs(&(&w.schouten - &g * 0.25)) < 1e-12);
        assert_relative_eq!(w.y, 0.5, epsilon = 1e-12);
        let (lambda, res) = quasi_einstein_residual(&w, &g, 3, 2.0);
        assert_relative_eq!(lambda, 0.25, epsilon = 1e-12);
        assert!(res < 1e-10);
        let (v1, v2) = v1_v2_closed_form(&w, 2.0);
        assert_relative_eq!(v1, 1.25, epsilon = 1e-12);
        assert_relative_eq!(v2, 0.625, epsilon = 1e-12);
    }

    #[test]
    fn wrong_density_is_not_quasi_einstein() {
        let g = sphere_point(&[0.1, 0.2, 0.0], 4);
        let f = g.get(0, 0).constant_like(1.0);
        let p = MetricMeasurePoint::new(g, f, 2.0, 1.0).unwrap();
        let w = weighted_invariants(&p).unwrap();
        let (_, res) = quasi_einstein_residual(&w, &p.metric().value(), 3, 2.0);
        assert!(res > 0.01);
    }

    #[test]
    fn gaussian_density_on_flat_space() {
        let g = flat_point(&[0.0, 0.0, 0.0], 4);
        let x = Jet::variables(&[0.0, 0.0, 0.0], 4).unwrap();
        let r2 = x.iter().fold(x[0].constant_like(0.0), |a, xi| &a + &(xi * xi));
        let f = r2.scale(-0.25).exp();
        let p = MetricMeasurePoint::new(g, f, 2.0, 0.0).unwrap();
        let w = weighted_invariants(&p).unwrap();
        assert!(linalg::max_abs(&(&w.ric_phi - Matrix::identity(3, 3))) < 1e-14);
        assert_relative_eq!(w.r_phi, 6.0, epsilon = 1e-14);
        assert_relative_eq!(w.j, 0.75, epsilon = 1e-14);
        let alt = ric_phi_alternate(&p).unwrap();
        assert!(linalg::max_abs(&(alt - Matrix::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn constant_density_alternate_route_is_ricci() {
        let p = qe_sphere();
        let alt = ric_phi_alternate(&p).unwrap();
        let ric = chart::curvature(p.metric()).unwrap().ricci;
        assert!(linalg::max_abs(&(alt - ric)) < 1e-14);
    }

    #[test]
    fn construction_errors() {
        let g = flat_point(&[0.0, 0.0, 0.0], 2);
        let x = Jet::variables(&[0.0, 0.0, 0.0], 2).unwrap();
        let neg = x[0].constant_like(-1.0);
        assert!(matches!(
            MetricMeasurePoint::new(g.clone(), neg, 2.0, 0.0),
            Err(Error::Domain(_))
        ));
        let bumpy = &x[0] + 1.0;
        assert!(MetricMeasurePoint::new(g.clone(), bumpy, 0.0, 0.0).is_err());
        let g2 = flat_point(&[0.0, 0.0], 2);
        let one = g2.get(0, 0).constant_like(1.0);
        assert!(MetricMeasurePoint::new(g2, one, 0.0, 0.0).is_err());
    }

    #[test]
    fn unweighted_limit_is_classical() {
        let g = sphere_point(&[0.3, -0.1, 0.2], 4);
        let f = g.get(0, 0).constant_like(1.0);
        let p = MetricMeasurePoint::new(g, f, 0.0, 0.0).unwrap();
        let w = weighted_invariants(&p).unwrap();
        let gv = p.metric().value();
        assert_relative_eq!(w.j, 1.5, epsilon = 1e-12);
        assert!(linalg::max_abs(&(&w.schouten - &gv * 0.5)) < 1e-12);
        assert_eq!(w.y, 0.0);
    }

    #[test]
    fn conversion_between_conventions_is_an_involution() {
        let x = Jet::variables(&[0.1, 0.2], 3).unwrap();
        let omega = &(&x[0] * &x[1]) + &x[0];
        let d = ConformalDeformation::weighted(omega.clone());
        let back = d.converted(5.0).converted(5.0);
        assert_eq!(back.convention, Convention::Weighted);
        assert!(back.omega.max_abs_diff(&omega) < 1e-15);
        let s = d.converted(5.0);
        assert!(s.omega.max_abs_diff(&omega.scale(-1.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn rescale_by_constant() {
        let p = qe_sphere();
        let s: f64 = 1.7;
        let omega = p.density().constant_like(s.ln());
        let q = conformal_rescale(&p, &ConformalDeformation::standard(omega));
        let gv = p.metric().value();
        assert!(linalg::max_abs(&(q.metric().value() - &gv * (s * s))) < 1e-12);
        assert_relative_eq!(q.density().value(), s * p.density().value(), epsilon = 1e-14);
        assert_eq!((q.m(), q.mu()), (p.m(), p.mu()));
    }

    #[test]
    fn zero_deformation_has_zero_residual() {
        let p = qe_sphere();
        let omega = p.density().constant_like(0.0);
        assert_eq!(check_conformal_laws(&p, &omega).unwrap().max(), 0.0);
    }

    fn generic_structure(m: f64) -> (MetricMeasurePoint, Jet) {
        let pt = [0.2, -0.1, 0.3];
        let x = Jet::variables(&pt, 4).unwrap();
        let one = x[0].constant_like(1.0);
        let g = MetricAtPoint::new(
            vec![
                vec![&one + &(&x[1] * &x[1]).scale(0.3), x[2].scale(0.2), x[0].scale(0.1)],
                vec![x[2].scale(0.2), &one + &x[0].sin().scale(0.2), (&x[0] * &x[1]).scale(0.1)],
                vec![x[0].scale(0.1), (&x[0] * &x[1]).scale(0.1), (&x[2] * &x[2]).scale(0.5).exp()],
            ],
            pt.to_vec(),
        )
        .unwrap();
        let f = if m == 0.0 { one.clone() } else { (&x[0] - &x[1].scale(0.5)).cos().exp() };
        let omega = &(&x[0] * &x[2]) + &(&x[1].scale(0.7) + &(&x[1] * &x[1]).scale(-0.4));
        (MetricMeasurePoint::new(g, f, m, 0.6).unwrap(), omega)
    }

    #[test]
    fn conformal_laws_hold_on_a_generic_structure() {
        for m in [0.0, 1.0, 2.5] {
            let (p, omega) = generic_structure(m);
            let r = check_conformal_laws(&p, &omega).unwrap();
            assert!(r.max() < 1e-10, "m = {m}: {r:?}");
        }
    }

    #[test]
    fn unit_prefactor_only_fits_total_dimension_three() {
        let (p, omega) = generic_structure(1.0);
        assert!(conformal_law_residuals(&p, &omega, 1.0).unwrap().max() > 1e-3);
        let (p, omega) = generic_structure(0.0);
        assert!(conformal_law_residuals(&p, &omega, 1.0).unwrap().max() < 1e-10);
    }

    #[test]
    fn sigma_examples() {
        let g = Matrix::identity(3, 3);
        let p = &g * 0.25;
        assert_eq!(sigma_k_phi(0.5, &p, &g, 2.0, 0).unwrap(), 1.0);
        assert_relative_eq!(sigma_k_phi(0.5, &p, &g, 2.0, 1).unwrap(), 1.25, epsilon = 1e-15);
        assert_relative_eq!(sigma_k_phi(0.5, &p, &g, 2.0, 2).unwrap(), 0.625, epsilon = 1e-15);
        assert_relative_eq!(
            sigma_k_phi_multiset(0.5, &p, &g, 2, 2).unwrap(),
            0.625,
            epsilon = 1e-15
        );
        assert_relative_eq!(sigma_k_phi(0.5, &p, &g, 0.0, 2).unwrap(), 3.0 / 16.0, epsilon = 1e-15);
    }
}
