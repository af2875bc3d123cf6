//! Straight and normal weighted ambient data `(g_ρ, f_ρ)` at one point and the
//! quantities read off from its `ρ`-expansion.
//!
//! Coefficients are Taylor coefficients: `gcoeffs[k] = ∂_ρ^k g_ρ / k!` at `ρ = 0`,
//! and likewise for `f`. So `f″(0) = 2·fcoeffs[2]`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::series::{MatrixSeries, RhoSeries, ScalarSeries};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientExpansion {
    g: MatrixSeries,
    f: ScalarSeries,
    self_consistent: bool,
}

impl AmbientExpansion {
    pub fn new(gcoeffs: Vec<Matrix>, fcoeffs: Vec<f64>) -> Result<Self> {
        if gcoeffs.is_empty() || gcoeffs.len() != fcoeffs.len() {
            return Err(Error::invalid(format!(
                "need equally many g and f coefficients (got {} and {})",
                gcoeffs.len(),
                fcoeffs.len()
            )));
        }
        let n = gcoeffs[0].nrows();
        for (k, c) in gcoeffs.iter().enumerate() {
            if c.nrows() != n || c.ncols() != n {
                return Err(Error::DimensionMismatch(c.nrows(), n));
            }
            let scale = linalg::max_abs(c).max(1.0);
            if linalg::asymmetry(c) > SYMMETRY_TOL * scale {
                return Err(Error::invalid(format!("g coefficient {k} is not symmetric")));
            }
        }
        if !linalg::is_positive_definite(&gcoeffs[0]) {
            return Err(Error::invalid("base metric is not positive definite"));
        }
        if !(fcoeffs[0] > 0.0) {
            return Err(Error::domain(format!("base density must be positive, got {}", fcoeffs[0])));
        }
        let gcoeffs = gcoeffs.iter().map(linalg::symmetrize).collect();
        Ok(AmbientExpansion {
            g: RhoSeries::new(gcoeffs)?,
            f: RhoSeries::new(fcoeffs)?,
            self_consistent: false,
        })
    }

    /// Marks the expansion as satisfying the `f″` relation by construction.
    pub fn flagged_self_consistent(mut self) -> Self {
        self.self_consistent = true;
        self
    }

    pub fn is_flagged_self_consistent(&self) -> bool {
        self.self_consistent
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.g.order()
    }

    pub fn base_metric(&self) -> &Matrix {
        &self.g.coeffs()[0]
    }

    pub fn base_density(&self) -> f64 {
        self.f.coeffs()[0]
    }

    pub fn gcoeffs(&self) -> &[Matrix] {
        self.g.coeffs()
    }

    pub fn fcoeffs(&self) -> &[f64] {
        self.f.coeffs()
    }

    pub fn metric_series(&self) -> &MatrixSeries {
        &self.g
    }

    pub fn density_series(&self) -> &ScalarSeries {
        &self.f
    }

    pub fn truncate(&self, order: usize) -> Self {
        AmbientExpansion {
            g: self.g.truncate(order),
            f: self.f.truncate(order),
            self_consistent: self.self_consistent,
        }
    }
}

/// Largest order for which `v_k` is determined: `(n+m)/2` when `n+m` is an
/// even integer, unbounded otherwise.
pub fn determinacy_cap(total_dim: f64) -> Option<usize> {
    let r = total_dim.round();
    if (total_dim - r).abs() < 1e-12 && r >= 0.0 && (r as u64).is_multiple_of(2) {
        Some(r as usize / 2)
    } else {
        None
    }
}

fn check_cap(n: usize, m: f64, requested: usize) -> Result<()> {
    match determinacy_cap(n as f64 + m) {
        Some(cap) if requested > cap => Err(Error::BeyondDeterminacy { requested, cap }),
        _ => Ok(()),
    }
}

/// `v₁ … v_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeCoefficients {
    pub v: Vec<f64>,
}

impl VolumeCoefficients {
    /// `v_k` for `1 ≤ k ≤ K`.
    pub fn get(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.v.get(i).copied())
    }
}

/// `v(ρ) = (f_ρ/f)^m (det g_ρ / det g)^{1/2}`.
pub fn volume_series(a: &AmbientExpansion, m: f64) -> Result<ScalarSeries> {
    if !(m >= 0.0) {
        return Err(Error::invalid(format!("m = {m} must be >= 0")));
    }
    let det = a.g.det()?;
    let d0 = det.coeffs()[0];
    let mut v = det.scale(1.0 / d0).pow(0.5)?;
    if m != 0.0 {
        let fr = a.f.scale(1.0 / a.base_density()).pow(m)?;
        v = fr.try_mul(&v)?;
    }
    Ok(v)
}

pub fn volume_coefficients(a: &AmbientExpansion, m: f64) -> Result<VolumeCoefficients> {
    if a.order() < 1 {
        return Err(Error::InsufficientOrder {
            needed: 1,
            available: 0,
        });
    }
    check_cap(a.dim(), m, a.order())?;
    let v = volume_series(a, m)?;
    Ok(VolumeCoefficients {
        v: v.coeffs()[1..].to_vec(),
    })
}

fn require_order(a: &AmbientExpansion, needed: usize) -> Result<()> {
    if a.order() < needed {
        return Err(Error::InsufficientOrder {
            needed,
            available: a.order(),
        });
    }
    Ok(())
}

/// `Λ^{(1)}(ρ) = ½(g″ − ½ g′ g⁻¹ g′)`.
pub fn lambda_one_series(a: &AmbientExpansion) -> Result<MatrixSeries> {
    require_order(a, 2)?;
    let d1 = a.g.derivative()?;
    let d2 = d1.derivative()?;
    let ginv = a.g.inverse()?;
    let quad = d1.try_mul(&ginv)?.try_mul(&d1)?;
    Ok(d2.try_sub(&quad.scale(0.5))?.scale(0.5).symmetrized())
}

/// `Ω^{(1)} … Ω^{(K−1)}` with the series `Λ^{(k)}(ρ)` they come from.
#[derive(Debug, Clone)]
pub struct ObstructionSet {
    pub omega: Vec<Matrix>,
    pub lambda_series: Vec<MatrixSeries>,
}

impl ObstructionSet {
    /// `g^{ij} Ω^{(k)}_{ij}` for each `k`.
    pub fn traces(&self, ginv: &Matrix) -> Vec<f64> {
        self.omega.iter().map(|o| linalg::trace_with(ginv, o)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.omega.iter().fold(0.0, |m, o| m.max(linalg::max_abs(o)))
    }
}

/// Runs `Λ^{(k+1)} = ∂_ρΛ^{(k)} − ½(g′g⁻¹Λ^{(k)} + Λ^{(k)}g⁻¹g′)` and restricts to `ρ = 0`.
pub fn obstruction_tensors(a: &AmbientExpansion) -> Result<ObstructionSet> {
    let mut current = lambda_one_series(a)?;
    let d1 = a.g.derivative()?;
    let ginv = a.g.inverse()?;
    let left = d1.try_mul(&ginv)?;
    let right = ginv.try_mul(&d1)?;
    let mut lambda_series = vec![current.clone()];
    while current.order() > 0 {
        let corr = left
            .try_mul(&current)?
            .try_add(&current.try_mul(&right)?)?
            .scale(0.5);
        current = current.derivative()?.try_sub(&corr)?.symmetrized();
        lambda_series.push(current.clone());
    }
    let omega = lambda_series.iter().map(|s| s.coeffs()[0].clone()).collect();
    Ok(ObstructionSet {
        omega,
        lambda_series,
    })
}

/// `|f″(0) + (f/m) g^{ij} Λ^{(1)}_{ij}(0)|`.
pub fn f_second_residual(a: &AmbientExpansion, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::invalid("the f'' relation needs m > 0"));
    }
    require_order(a, 2)?;
    let lam = lambda_one_series(a)?;
    let ginv = linalg::inverse(a.base_metric())?;
    let tr = linalg::trace_with(&ginv, &lam.coeffs()[0]);
    Ok((2.0 * a.fcoeffs()[2] + a.base_density() / m * tr).abs())
}

/// `v(ρ) ∫₀^ρ g^{ij}(u) du` truncated at order `K`.
pub fn l_product_series(a: &AmbientExpansion, m: f64) -> Result<MatrixSeries> {
    let v = volume_series(a, m)?;
    let ginv = a.g.inverse()?;
    Ok(v.mul_matrix(&ginv.antiderivative()).symmetrized())
}

/// `(L_k)^{ij} = −[ρ^k] v(ρ) ∫₀^ρ g^{ij}`.
pub fn l_operator(a: &AmbientExpansion, m: f64, k: usize) -> Result<Matrix> {
    if k < 1 || k > a.order() {
        return Err(Error::invalid(format!(
            "L_k needs 1 <= k <= {}, got k = {k}",
            a.order()
        )));
    }
    check_cap(a.dim(), m, k)?;
    Ok(-l_product_series(a, m)?.coeffs()[k].clone())
}

/// An ambient coefficient file: header `n m mu K`, rows `g k i j value` and `f k value`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFile {
    pub m: f64,
    pub mu: f64,
    pub expansion: AmbientExpansion,
}

pub fn format_coefficient_file(a: &AmbientExpansion, m: f64, mu: f64) -> String {
    let n = a.dim();
    let mut out = String::new();
    let _ = writeln!(out, "# n m mu K");
    let _ = writeln!(out, "{n} {m:.16e} {mu:.16e} {}", a.order());
    for (k, c) in a.gcoeffs().iter().enumerate() {
        for i in 0..n {
            for j in 0..=i {
                let _ = writeln!(out, "g {k} {} {} {:.16e}", i + 1, j + 1, c[(i, j)]);
            }
        }
    }
    for (k, c) in a.fcoeffs().iter().enumerate() {
        let _ = writeln!(out, "f {k} {c:.16e}");
    }
    out
}

pub fn write_coefficient_file(path: &Path, a: &AmbientExpansion, m: f64, mu: f64) -> Result<()> {
    std::fs::write(path, format_coefficient_file(a, m, mu)).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_coefficient_file(path: &Path) -> Result<CoefficientFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_coefficient_file(&text, path)
}

pub fn parse_coefficient_file(text: &str, path: &Path) -> Result<CoefficientFile> {
    let err = |line: usize, message: String| Error::Format {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut header: Option<(usize, f64, f64, usize)> = None;
    let mut g: Vec<Matrix> = Vec::new();
    let mut g_seen: Vec<Vec<bool>> = Vec::new();
    let mut f: Vec<Option<f64>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(line_no, format!("`{s}` is not a finite number")))
        };
        let int = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| err(line_no, format!("`{s}` is not a non-negative integer")))
        };
        let Some((n, _, _, k_max)) = header else {
            if fields.len() != 4 {
                return Err(err(line_no, "header must be `n m mu K`".into()));
            }
            let n = int(fields[0])?;
            if !(1..=4).contains(&n) {
                return Err(err(line_no, format!("dimension n = {n} must be 1..=4")));
            }
            let k = int(fields[3])?;
            header = Some((n, num(fields[1])?, num(fields[2])?, k));
            g = vec![Matrix::zeros(n, n); k + 1];
            g_seen = vec![vec![false; n * n]; k + 1];
            f = vec![None; k + 1];
            continue;
        };
        match fields[0] {
            "g" => {
                if fields.len() != 5 {
                    return Err(err(line_no, "expected `g k i j value`".into()));
                }
                let k = int(fields[1])?;
                let i = int(fields[2])?;
                let j = int(fields[3])?;
                let value = num(fields[4])?;
                if k > k_max {
                    return Err(err(line_no, format!("order {k} exceeds K = {k_max}")));
                }
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(err(line_no, format!("indices ({i}, {j}) must lie in 1..={n}")));
                }
                let (i, j) = (i - 1, j - 1);
                for (a, b) in [(i, j), (j, i)] {
                    if g_seen[k][a * n + b] && (g[k][(a, b)] - value).abs() > SYMMETRY_TOL * value.abs().max(1.0) {
                        return Err(err(line_no, format!("conflicting value for g[{k}] ({}, {})", i + 1, j + 1)));
                    }
                    g[k][(a, b)] = value;
                    g_seen[k][a * n + b] = true;
                }
            }
            "f" => {
                if fields.len() != 3 {
                    return Err(err(line_no, "expected `f k value`".into()));
                }
                let k = int(fields[1])?;
                if k > k_max {
                    return Err(err(line_no, format!("order {k} exceeds K = {k_max}")));
                }
                let value = num(fields[2])?;
                if f[k].is_some_and(|old| old != value) {
                    return Err(err(line_no, format!("duplicate f coefficient {k}")));
                }
                f[k] = Some(value);
            }
            other => return Err(err(line_no, format!("unknown record `{other}`"))),
        }
    }
    let Some((_, m, mu, _)) = header else {
        return Err(err(0, "missing header `n m mu K`".into()));
    };
    if f[0].is_none() {
        return Err(err(0, "missing base density `f 0 value`".into()));
    }
    let expansion = AmbientExpansion::new(g, f.into_iter().map(|c| c.unwrap_or(0.0)).collect())
        .map_err(|e| err(0, e.to_string()))?;
    Ok(CoefficientFile { m, mu, expansion })
}
