//! Truncated power series in `ρ` with scalar or matrix coefficients.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Coefficient ring of a [`RhoSeries`].
pub trait Coefficient: Clone + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn scale(&self, s: f64) -> Self;
    fn max_abs(&self) -> f64;
}

impl Coefficient for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for Matrix {
    fn zero_like(&self) -> Self {
        Matrix::zeros(self.nrows(), self.ncols())
    }
    fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(self.nrows(), other.nrows()));
        }
        Ok(self + other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols() != other.nrows() {
            return Err(Error::DimensionMismatch(self.ncols(), other.nrows()));
        }
        Ok(self * other)
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        linalg::max_abs(self)
    }
}

/// `c₀ + c₁ρ + … + c_Kρ^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoSeries<T> {
    coeffs: Vec<T>,
}

pub type ScalarSeries = RhoSeries<f64>;
pub type MatrixSeries = RhoSeries<Matrix>;

impl<T: Coefficient> RhoSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a series needs at least one coefficient"));
        }
        if let Some(first) = coeffs.first() {
            for c in &coeffs[1..] {
                first.add(c)?;
            }
        }
        Ok(RhoSeries { coeffs })
    }

    /// `c` followed by `order` zero coefficients.
    pub fn constant(c: T, order: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = c;
        RhoSeries { coeffs }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k)
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        RhoSeries {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        RhoSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let k = self.order().min(other.order());
        let coeffs = (0..=k)
            .map(|i| self.coeffs[i].add(&other.coeffs[i]))
            .collect::<Result<_>>()?;
        Ok(RhoSeries { coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-1.0))
    }

    /// Cauchy product (`self` on the left).
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let k = self.order().min(other.order());
        let mut coeffs = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut acc = self.coeffs[0].mul(&other.coeffs[i])?;
            for j in 1..=i {
                acc = acc.add(&self.coeffs[j].mul(&other.coeffs[i - j])?)?;
            }
            coeffs.push(acc);
        }
        Ok(RhoSeries { coeffs })
    }

    /// `∂_ρ`; the order drops by one.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::InsufficientOrder {
                needed: 1,
                available: 0,
            });
        }
        Ok(RhoSeries {
            coeffs: (1..=self.order())
                .map(|k| self.coeffs[k].scale(k as f64))
                .collect(),
        })
    }

    /// `∫₀^ρ`; the order rises by one.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(self.coeffs[0].zero_like());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(1.0 / (k as f64 + 1.0))),
        );
        RhoSeries { coeffs }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }
}

impl ScalarSeries {
    /// Evaluates the truncated polynomial.
    pub fn eval(&self, rho: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * rho + c)
    }

    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if !(a0.abs() > 1e-300) {
            return Err(Error::Singular(format!("series with leading coefficient {a0:e}")));
        }
        let mut b = Vec::with_capacity(self.coeffs.len());
        b.push(1.0 / a0);
        for k in 1..=self.order() {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * b[k - j]).sum();
            b.push(-s / a0);
        }
        Ok(RhoSeries { coeffs: b })
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut b = Vec::with_capacity(a.len());
        b.push(a[0].exp());
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b.push(s / k as f64);
        }
        RhoSeries { coeffs: b }
    }

    pub fn log(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if !(a0 > 0.0) {
            return Err(Error::domain(format!(
                "log of a series with leading coefficient {a0} (must be positive)"
            )));
        }
        if self.order() == 0 {
            return Ok(RhoSeries::constant(a0.ln(), 0));
        }
        let quotient = self.derivative()?.try_mul(&self.truncate(self.order() - 1).recip()?)?;
        let mut out = quotient.antiderivative();
        out.coeffs[0] = a0.ln();
        Ok(out)
    }

    pub fn pow(&self, alpha: f64) -> Result<Self> {
        Ok(self.log()?.scale(alpha).exp())
    }

    /// Scalar series times matrix series.
    pub fn mul_matrix(&self, other: &MatrixSeries) -> MatrixSeries {
        let k = self.order().min(other.order());
        let coeffs = (0..=k)
            .map(|i| {
                (0..=i).fold(other.coeffs[0].zero_like(), |acc, j| {
                    acc + &other.coeffs[i - j] * self.coeffs[j]
                })
            })
            .collect();
        RhoSeries { coeffs }
    }
}

impl MatrixSeries {
    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Symmetric part of every coefficient.
    pub fn symmetrized(&self) -> Self {
        RhoSeries {
            coeffs: self.coeffs.iter().map(linalg::symmetrize).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        RhoSeries {
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let a0inv = linalg::inverse(&self.coeffs[0])?;
        let mut b: Vec<Matrix> = Vec::with_capacity(self.coeffs.len());
        b.push(a0inv.clone());
        for k in 1..=self.order() {
            let s = (1..=k).fold(Matrix::zeros(self.dim(), self.dim()), |acc, j| {
                acc + &self.coeffs[j] * &b[k - j]
            });
            b.push(-&a0inv * s);
        }
        Ok(RhoSeries { coeffs: b })
    }

    /// `det A(ρ) = det A₀ · exp ∫₀^ρ tr(A⁻¹A′)`.
    pub fn det(&self) -> Result<ScalarSeries> {
        let d0 = linalg::det(&self.coeffs[0]);
        if self.order() == 0 {
            linalg::inverse(&self.coeffs[0])?;
            return Ok(RhoSeries::constant(d0, 0));
        }
        let inv = self.truncate(self.order() - 1).inverse()?;
        let prod = inv.try_mul(&self.derivative()?)?;
        let tr = RhoSeries {
            coeffs: prod.coeffs.iter().map(|c| c.trace()).collect::<Vec<_>>(),
        };
        Ok(tr.antiderivative().exp().scale(d0))
    }

    /// `tr(B · A_k)` coefficient-wise for a fixed `B`.
    pub fn trace_with(&self, b: &Matrix) -> ScalarSeries {
        RhoSeries {
            coeffs: self.coeffs.iter().map(|c| (b * c).trace()).collect(),
        }
    }

    /// Largest asymmetry over all coefficients.
    pub fn asymmetry(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(linalg::asymmetry(c)))
    }
}

/// Maps `Σ a_j r^j` (even powers only) to `Σ a_{2k} (−2)^k ρ^k` under `ρ = −r²/2`.
pub fn poincare_to_ambient(r_coeffs: &[f64], tol: f64) -> Result<ScalarSeries> {
    if r_coeffs.is_empty() {
        return Err(Error::invalid("empty series in r"));
    }
    if let Some((j, c)) = r_coeffs
        .iter()
        .enumerate()
        .find(|(j, c)| j % 2 == 1 && c.abs() > tol)
    {
        return Err(Error::invalid(format!(
            "coefficient of r^{j} is {c:e}; only even powers of r are allowed"
        )));
    }
    let coeffs = r_coeffs
        .iter()
        .step_by(2)
        .enumerate()
        .map(|(k, c)| c * (-2.0f64).powi(k as i32))
        .collect();
    RhoSeries::new(coeffs)
}
