//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients of an analytic function of up to
//! four chart variables about a base point, up to a fixed total degree. The
//! coefficient of the monomial `x^α` is `∂^α u / α!`, so derivatives of any
//! order up to the truncation are recovered exactly with [`Jet::partial`].
//!
//! Coefficients are stored densely in graded-lexicographic order: all
//! monomials of degree 0, then degree 1 (`x0, x1, ...`), then degree 2
//! (`x0², x0·x1, ...`) and so on. A jet of order `k` is therefore a prefix of
//! the same function's jet of any higher order, which is how mixed-order
//! arithmetic truncates.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;
pub const MAX_ORDER: usize = 6;

/// Smallest admissible magnitude of a constant term that gets inverted.
pub const RECIPROCAL_FLOOR: f64 = 1e-300;

type Exponent = [u8; MAX_DIM];

struct Layout {
    exponents: Vec<Exponent>,
    rank: HashMap<Exponent, usize>,
    /// `(i, j, k)` with `exponents[i] + exponents[j] == exponents[k]`.
    products: Vec<(u16, u16, u16)>,
}

impl Layout {
    fn build(dim: usize, order: usize) -> Self {
        let mut exponents = Vec::new();
        for degree in 0..=order {
            let mut current = [0u8; MAX_DIM];
            push_degree(dim, 0, degree, &mut current, &mut exponents);
        }
        let rank: HashMap<Exponent, usize> =
            exponents.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            let da = degree_of(a);
            for (j, b) in exponents.iter().enumerate() {
                if da + degree_of(b) > order {
                    continue;
                }
                let mut sum = [0u8; MAX_DIM];
                for v in 0..MAX_DIM {
                    sum[v] = a[v] + b[v];
                }
                products.push((i as u16, j as u16, rank[&sum] as u16));
            }
        }
        Layout {
            exponents,
            rank,
            products,
        }
    }
}

// Lexicographically descending enumeration of exponents with a fixed total degree.
fn push_degree(dim: usize, var: usize, remaining: usize, cur: &mut Exponent, out: &mut Vec<Exponent>) {
    if var + 1 == dim {
        cur[var] = remaining as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[var] = e as u8;
        push_degree(dim, var + 1, remaining - e, cur, out);
    }
    cur[var] = 0;
}

fn degree_of(e: &Exponent) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

fn layouts() -> &'static [Layout] {
    static LAYOUTS: OnceLock<Vec<Layout>> = OnceLock::new();
    LAYOUTS.get_or_init(|| {
        let mut all = Vec::with_capacity(MAX_DIM * (MAX_ORDER + 1));
        for dim in 1..=MAX_DIM {
            for order in 0..=MAX_ORDER {
                all.push(Layout::build(dim, order));
            }
        }
        all
    })
}

fn layout(dim: usize, order: usize) -> &'static Layout {
    &layouts()[(dim - 1) * (MAX_ORDER + 1) + order]
}

fn check_shape(dim: usize, order: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM || order > MAX_ORDER {
        return Err(Error::UnsupportedShape { dim, order });
    }
    Ok(())
}

/// Number of monomials of total degree `<= order` in `dim` variables.
pub fn coefficient_count(dim: usize, order: usize) -> usize {
    // C(dim + order, order)
    let mut c = 1usize;
    for i in 1..=order {
        c = c * (dim + i) / i;
    }
    c
}

/// Univariate analytic functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticFn {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Pow(f64),
}

impl AnalyticFn {
    /// Taylor coefficients `f^(k)(x0)/k!` for `k = 0..=order`.
    fn taylor(self, x0: f64, order: usize) -> Result<Vec<f64>> {
        let mut c = Vec::with_capacity(order + 1);
        match self {
            AnalyticFn::Exp => {
                let e = x0.exp();
                let mut fact = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    c.push(e / fact);
                }
            }
            AnalyticFn::Log => {
                if !(x0 > 0.0) {
                    return Err(Error::domain(format!("log of non-positive value {x0}")));
                }
                c.push(x0.ln());
                for k in 1..=order {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    c.push(sign / (k as f64 * x0.powi(k as i32)));
                }
            }
            AnalyticFn::Sqrt => {
                if !(x0 > 0.0) {
                    return Err(Error::domain(format!("sqrt of non-positive value {x0}")));
                }
                return AnalyticFn::Pow(0.5).taylor(x0, order);
            }
            AnalyticFn::Sin | AnalyticFn::Cos => {
                let (s, co) = x0.sin_cos();
                let cycle = match self {
                    AnalyticFn::Sin => [s, co, -s, -co],
                    _ => [co, -s, -co, s],
                };
                let mut fact = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    c.push(cycle[k % 4] / fact);
                }
            }
            AnalyticFn::Pow(alpha) => {
                let integral = alpha.fract() == 0.0 && alpha.abs() < i32::MAX as f64;
                if integral {
                    if alpha < 0.0 && x0.abs() <= RECIPROCAL_FLOOR {
                        return Err(Error::domain(format!("negative power of {x0}")));
                    }
                } else if !(x0 > 0.0) {
                    return Err(Error::domain(format!(
                        "non-integer power {alpha} of non-positive value {x0}"
                    )));
                }
                let mut binom = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        binom *= (alpha - (k as f64 - 1.0)) / k as f64;
                    }
                    if binom == 0.0 {
                        c.push(0.0);
                        continue;
                    }
                    let p = if integral {
                        x0.powi(alpha as i32 - k as i32)
                    } else {
                        x0.powf(alpha - k as f64)
                    };
                    c.push(binom * p);
                }
            }
        }
        Ok(c)
    }
}

/// Truncated Taylor expansion of an analytic scalar at a chart point.
#[derive(Clone, PartialEq)]
pub struct Jet {
    dim: usize,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn zeros(dim: usize, order: usize) -> Result<Self> {
        check_shape(dim, order)?;
        Ok(Jet {
            dim,
            order,
            coeffs: vec![0.0; coefficient_count(dim, order)],
        })
    }

    pub fn constant(dim: usize, order: usize, value: f64) -> Result<Self> {
        let mut j = Jet::zeros(dim, order)?;
        j.coeffs[0] = value;
        Ok(j)
    }

    /// The coordinate function `x_index` expanded about `value`.
    pub fn variable(index: usize, value: f64, dim: usize, order: usize) -> Result<Self> {
        check_shape(dim, order)?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut j = Jet::constant(dim, order, value)?;
        if order >= 1 {
            j.coeffs[1 + index] = 1.0;
        }
        Ok(j)
    }

    /// All coordinate jets of a chart point.
    pub fn variables(point: &[f64], order: usize) -> Result<Vec<Jet>> {
        (0..point.len())
            .map(|i| Jet::variable(i, point[i], point.len(), order))
            .collect()
    }

    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_shape(dim, order)?;
        let expected = coefficient_count(dim, order);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch(coeffs.len(), expected));
        }
        Ok(Jet { dim, order, coeffs })
    }

    /// Constant jet with the same shape as `self`.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Exponent vectors in storage order (only the first `dim` entries are meaningful).
    pub fn monomials(&self) -> impl Iterator<Item = &'static [u8; MAX_DIM]> {
        layout(self.dim, self.order).exponents.iter()
    }

    fn rank_of(&self, multi_index: &[usize]) -> Result<usize> {
        if multi_index.len() != self.dim {
            return Err(Error::DimensionMismatch(multi_index.len(), self.dim));
        }
        let degree: usize = multi_index.iter().sum();
        if degree > self.order {
            return Err(Error::OrderExceeded {
                requested: degree,
                available: self.order,
            });
        }
        let mut e = [0u8; MAX_DIM];
        for (slot, &v) in e.iter_mut().zip(multi_index) {
            *slot = v as u8;
        }
        Ok(layout(self.dim, self.order).rank[&e])
    }

    /// Taylor coefficient of `x^α`.
    pub fn coeff(&self, multi_index: &[usize]) -> Result<f64> {
        Ok(self.coeffs[self.rank_of(multi_index)?])
    }

    /// The partial derivative `∂^α` at the base point.
    pub fn partial(&self, multi_index: &[usize]) -> Result<f64> {
        let c = self.coeff(multi_index)?;
        let factorial: f64 = multi_index
            .iter()
            .map(|&a| (1..=a).map(|i| i as f64).product::<f64>())
            .product();
        Ok(c * factorial)
    }

    /// `∂_i u` at the base point.
    pub fn d1(&self, i: usize) -> f64 {
        debug_assert!(self.order >= 1 && i < self.dim);
        self.coeffs[1 + i]
    }

    /// `∂_i ∂_j u` at the base point.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        debug_assert!(self.order >= 2);
        let mut e = [0usize; MAX_DIM];
        e[i] += 1;
        e[j] += 1;
        self.partial(&e[..self.dim]).expect("order checked")
    }

    /// The jet of `∂_i u`, one order lower.
    pub fn derivative(&self, i: usize) -> Result<Jet> {
        if i >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        if self.order == 0 {
            return Err(Error::InsufficientOrder {
                needed: 1,
                available: 0,
            });
        }
        let target = layout(self.dim, self.order - 1);
        let source = layout(self.dim, self.order);
        let coeffs = target
            .exponents
            .iter()
            .map(|e| {
                let mut up = *e;
                up[i] += 1;
                (up[i] as f64) * self.coeffs[source.rank[&up]]
            })
            .collect();
        Ok(Jet {
            dim: self.dim,
            order: self.order - 1,
            coeffs,
        })
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            dim: self.dim,
            order,
            coeffs: self.coeffs[..coefficient_count(self.dim, order)].to_vec(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Result<Jet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let order = self.order.min(other.order);
        let len = coefficient_count(self.dim, order);
        let coeffs = self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Jet {
            dim: self.dim,
            order,
            coeffs,
        })
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Truncated Cauchy product; the result carries the smaller order.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let order = self.order.min(other.order);
        let lay = layout(self.dim, order);
        let mut coeffs = vec![0.0; lay.exponents.len()];
        for &(i, j, k) in &lay.products {
            coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Ok(Jet {
            dim: self.dim,
            order,
            coeffs,
        })
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        self.try_mul(&other.recip()?)
    }

    /// Series reciprocal; the constant term must exceed [`RECIPROCAL_FLOOR`] in magnitude.
    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.value();
        if !(a0.abs() > RECIPROCAL_FLOOR) {
            return Err(Error::domain(format!("reciprocal of jet with constant term {a0}")));
        }
        let mut c = Vec::with_capacity(self.order + 1);
        let inv = 1.0 / a0;
        let mut p = inv;
        for _ in 0..=self.order {
            c.push(p);
            p *= -inv;
        }
        Ok(self.compose(&c))
    }

    /// `fun ∘ self`, truncated to the order of `self`.
    pub fn apply(&self, fun: AnalyticFn) -> Result<Jet> {
        let c = fun.taylor(self.value(), self.order)?;
        Ok(self.compose(&c))
    }

    pub fn exp(&self) -> Jet {
        self.apply(AnalyticFn::Exp).expect("exp is entire")
    }

    pub fn ln(&self) -> Result<Jet> {
        self.apply(AnalyticFn::Log)
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.apply(AnalyticFn::Sqrt)
    }

    pub fn sin(&self) -> Jet {
        self.apply(AnalyticFn::Sin).expect("sin is entire")
    }

    pub fn cos(&self) -> Jet {
        self.apply(AnalyticFn::Cos).expect("cos is entire")
    }

    pub fn powf(&self, alpha: f64) -> Result<Jet> {
        self.apply(AnalyticFn::Pow(alpha))
    }

    // Horner evaluation of Σ c_k (self - self_0)^k.
    fn compose(&self, c: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut r = self.constant_like(c[self.order]);
        for k in (0..self.order).rev() {
            r = &r * &h;
            r.coeffs[0] += c[k];
        }
        r
    }

    /// Maximum absolute coefficient difference over the common order.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let len = self.coeffs.len().min(other.coeffs.len());
        self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$try(rhs).expect("jet dimension mismatch")
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);

impl Div<&Jet> for &Jet {
    type Output = Jet;
    /// Panics on a vanishing denominator; use [`Jet::try_div`] to handle it.
    fn div(self, rhs: &Jet) -> Jet {
        self.try_div(rhs).expect("jet division")
    }
}

impl Div<Jet> for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        &self / &rhs
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut r = self.clone();
        r.coeffs[0] += rhs;
        r
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_counts() {
        assert_eq!(coefficient_count(2, 2), 6);
        assert_eq!(coefficient_count(4, 6), 210);
        for dim in 1..=MAX_DIM {
            for order in 0..=MAX_ORDER {
                assert_eq!(
                    layout(dim, order).exponents.len(),
                    coefficient_count(dim, order)
                );
            }
        }
    }

    #[test]
    fn graded_lex_prefix_property() {
        let hi = &layout(3, 4).exponents;
        let lo = &layout(3, 2).exponents;
        assert_eq!(&hi[..lo.len()], &lo[..]);
        assert_eq!(hi[1], [1, 0, 0, 0]);
        assert_eq!(hi[4], [2, 0, 0, 0]);
        assert_eq!(hi[5], [1, 1, 0, 0]);
    }

    #[test]
    fn variable_examples() {
        let x = Jet::variable(0, 2.0, 2, 2).unwrap();
        assert_eq!(x.coeffs(), &[2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let y = Jet::variable(1, 0.0, 2, 1).unwrap();
        assert_eq!(y.coeffs(), &[0.0, 0.0, 1.0]);
        let x = Jet::variable(0, 3.0, 1, 2).unwrap();
        assert_eq!((&x * &x).coeffs(), &[9.0, 6.0, 1.0]);
        assert!(matches!(
            Jet::variable(2, 0.0, 2, 2),
            Err(Error::IndexOutOfRange { index: 2, dim: 2 })
        ));
    }

    #[test]
    fn mul_examples() {
        let x = Jet::variable(0, 0.0, 2, 2).unwrap();
        let y = Jet::variable(1, 0.0, 2, 2).unwrap();
        let p = (&x + 1.0) * (&y + 1.0);
        assert_eq!(p.coeff(&[0, 0]).unwrap(), 1.0);
        assert_eq!(p.coeff(&[1, 0]).unwrap(), 1.0);
        assert_eq!(p.coeff(&[0, 1]).unwrap(), 1.0);
        assert_eq!(p.coeff(&[1, 1]).unwrap(), 1.0);
        assert_eq!(p.coeff(&[2, 0]).unwrap(), 0.0);

        let one = x.constant_like(1.0);
        assert_eq!(&p * &one, p);

        let t = Jet::variable(0, 0.0, 1, 2).unwrap();
        let a = (&t * &t) + &t + 1.0;
        let b = -&t + 1.0;
        assert_eq!((&a * &b).coeffs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn mixed_order_truncates_down() {
        let a = Jet::variable(0, 1.0, 2, 4).unwrap();
        let b = Jet::variable(1, 1.0, 2, 2).unwrap();
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a + &b).order(), 2);
        let c = Jet::variable(0, 0.0, 3, 1).unwrap();
        assert!(matches!(a.try_mul(&c), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn analytic_examples() {
        let x = Jet::variable(0, 0.0, 1, 3).unwrap();
        let e = x.exp();
        for (c, want) in e.coeffs().iter().zip([1.0, 1.0, 0.5, 1.0 / 6.0]) {
            assert_relative_eq!(*c, want, epsilon = 1e-15);
        }
        let x2 = Jet::variable(0, 1.0, 1, 2).unwrap();
        let s = x2.powf(0.5).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 0.5, -0.125]);
        assert_relative_eq!(e.partial(&[3]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn domain_violations() {
        let z = Jet::constant(2, 2, 0.0).unwrap();
        assert!(matches!(z.ln(), Err(Error::Domain(_))));
        assert!(matches!(z.sqrt(), Err(Error::Domain(_))));
        assert!(matches!(z.recip(), Err(Error::Domain(_))));
        let neg = Jet::constant(2, 2, -1.0).unwrap();
        assert!(neg.powf(0.5).is_err());
        assert!(neg.powf(3.0).is_ok());
        assert_relative_eq!(neg.powf(-2.0).unwrap().value(), 1.0);
    }

    #[test]
    fn partial_examples() {
        let x = Jet::variable(0, 0.0, 2, 3).unwrap();
        let y = Jet::variable(1, 0.0, 2, 3).unwrap();
        let a = &(&x * &x) * &y;
        assert_eq!(a.partial(&[2, 1]).unwrap(), 2.0);
        let b = a.clone() + 5.0;
        assert_eq!(b.partial(&[0, 0]).unwrap(), 5.0);
        assert!(matches!(
            a.partial(&[3, 1]),
            Err(Error::OrderExceeded {
                requested: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn polynomial_inputs_are_exact() {
        // u = 1 + 2x - 3xy + y^3 at order 3 about the origin
        let x = Jet::variable(0, 0.0, 2, 3).unwrap();
        let y = Jet::variable(1, 0.0, 2, 3).unwrap();
        let u = &(&(&x * 2.0) - &(&(&x * &y) * 3.0)) + &(&(&y * &y) * &y) + 1.0;
        assert_eq!(u.coeff(&[0, 0]).unwrap(), 1.0);
        assert_eq!(u.coeff(&[1, 0]).unwrap(), 2.0);
        assert_eq!(u.coeff(&[1, 1]).unwrap(), -3.0);
        assert_eq!(u.coeff(&[0, 3]).unwrap(), 1.0);
        assert_eq!(u.partial(&[0, 3]).unwrap(), 6.0);
    }

    #[test]
    fn derivative_jet() {
        let x = Jet::variable(0, 1.0, 2, 3).unwrap();
        let y = Jet::variable(1, 2.0, 2, 3).unwrap();
        let u = &(&x * &x) * &y; // x^2 y
        let ux = u.derivative(0).unwrap(); // 2xy
        assert_eq!(ux.order(), 2);
        assert_relative_eq!(ux.value(), 4.0);
        assert_relative_eq!(ux.d1(0), 4.0);
        assert_relative_eq!(ux.d1(1), 2.0);
        assert_relative_eq!(ux.d2(0, 1), 2.0);
    }

    #[test]
    fn trig_identity() {
        let x = Jet::variable(0, 0.3, 2, 5).unwrap();
        let y = Jet::variable(1, -0.7, 2, 5).unwrap();
        let a = &(&x * &y) + &x;
        let s = a.sin();
        let c = a.cos();
        let one = &(&s * &s) + &(&c * &c);
        assert!(one.max_abs_diff(&a.constant_like(1.0)) < 1e-14);
    }
}
