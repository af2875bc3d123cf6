//! Small dense linear algebra on `n <= 4` symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

fn minor(a: &Matrix, row: usize, col: usize) -> Matrix {
    let n = a.nrows();
    Matrix::from_fn(n - 1, n - 1, |i, j| {
        let r = if i < row { i } else { i + 1 };
        let c = if j < col { j } else { j + 1 };
        a[(r, c)]
    })
}

/// Determinant by cofactor expansion (deterministic, no pivoting).
pub fn det(a: &Matrix) -> f64 {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    match n {
        0 => 1.0,
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        _ => (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * a[(0, j)] * det(&minor(a, 0, j))
            })
            .sum(),
    }
}

/// Inverse via the adjugate.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let d = det(a);
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if !(d.abs() > 1e-14 * scale.powi(n as i32)) {
        return Err(Error::Singular(format!("determinant {d:e}")));
    }
    if n == 1 {
        return Ok(Matrix::from_element(1, 1, 1.0 / d));
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * det(&minor(a, j, i)) / d
    }))
}

pub fn is_positive_definite(a: &Matrix) -> bool {
    a.clone().cholesky().is_some()
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn asymmetry(a: &Matrix) -> f64 {
    max_abs(&(a - a.transpose()))
}

/// Eigenvalues of `g⁻¹p` for symmetric `p` and positive definite `g`, ascending.
pub fn relative_eigenvalues(g: &Matrix, p: &Matrix) -> Result<Vec<f64>> {
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("metric is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("Cholesky factor".into()))?;
    let s = symmetrize(&(&linv * p * linv.transpose()));
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// `g^{ik} g^{jl} a_ij b_kl`.
pub fn contract(ginv: &Matrix, a: &Matrix, b: &Matrix) -> f64 {
    (ginv * a * ginv * b).trace()
}

/// `g^{ij} a_ij`.
pub fn trace_with(ginv: &Matrix, a: &Matrix) -> f64 {
    ginv.component_mul(a).sum()
}
