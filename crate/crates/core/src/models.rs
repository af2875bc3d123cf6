//! Built-in metric measure structures, model files, and ambient generators.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ambient::{self, AmbientExpansion};
use crate::chart::MetricAtPoint;
use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr};
use crate::jet::Jet;
use crate::linalg::{self, Matrix};
use crate::weighted::MetricMeasurePoint;

/// Where a model's ambient expansion comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum AmbientSource {
    /// `g_ρ = (1+λρ)²g`, `f_ρ = (1+λρ)f`.
    QuasiEinstein(f64),
    /// A coefficient file, independent of the chart point.
    Coefficients(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub n: usize,
    pub m: f64,
    pub mu: f64,
    pub coords: Vec<String>,
    /// Full `n × n` component table.
    pub metric: Vec<Vec<Expr>>,
    pub density: Expr,
    pub ambient: Option<AmbientSource>,
}

impl ModelSpec {
    pub fn lambda(&self) -> Option<f64> {
        match self.ambient {
            Some(AmbientSource::QuasiEinstein(l)) => Some(l),
            _ => None,
        }
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch(point.len(), self.n));
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("chart point has non-finite coordinates"));
        }
        Ok(())
    }

    pub fn metric_at(&self, point: &[f64], order: usize) -> Result<MetricAtPoint> {
        self.check_point(point)?;
        let x = Jet::variables(point, order)?;
        let rows = self
            .metric
            .iter()
            .map(|row| row.iter().map(|e| e.eval_jet(&x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        MetricAtPoint::new(rows, point.to_vec())
    }

    pub fn density_at(&self, point: &[f64], order: usize) -> Result<Jet> {
        self.check_point(point)?;
        self.density.eval_jet(&Jet::variables(point, order)?)
    }

    pub fn metric_value(&self, point: &[f64]) -> Result<Matrix> {
        self.check_point(point)?;
        let mut g = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                g[(i, j)] = self.metric[i][j].eval_real(point)?;
            }
        }
        Ok(g)
    }

    pub fn density_value(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        self.density.eval_real(point)
    }

    pub fn structure_at(&self, point: &[f64], order: usize) -> Result<MetricMeasurePoint> {
        MetricMeasurePoint::new(
            self.metric_at(point, order)?,
            self.density_at(point, order)?,
            self.m,
            self.mu,
        )
    }

    /// Ambient expansion at `point` truncated at order `k`.
    pub fn ambient_expansion(&self, point: &[f64], k: usize) -> Result<AmbientExpansion> {
        match &self.ambient {
            Some(AmbientSource::QuasiEinstein(_)) => quasi_einstein_ambient(self, point, k),
            Some(AmbientSource::Coefficients(path)) => {
                let file = ambient::read_coefficient_file(path)?;
                if file.expansion.dim() != self.n {
                    return Err(Error::DimensionMismatch(file.expansion.dim(), self.n));
                }
                if file.expansion.order() < k {
                    return Err(Error::InsufficientOrder {
                        needed: k,
                        available: file.expansion.order(),
                    });
                }
                Ok(file.expansion.truncate(k))
            }
            None => Err(Error::invalid(format!(
                "model `{}` has no ambient generator (set [ambient] lambda or coefficients)",
                self.name
            ))),
        }
    }
}

fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn conformally_flat(name: &str, n: usize, m: f64, mu: f64, factor: &str, density: &str, lambda: Option<f64>) -> Result<ModelSpec> {
    let coords = coordinate_names(n);
    let diag = parse_expression(factor, &coords)?;
    let metric = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { diag.clone() } else { Expr::Num(0.0) })
                .collect()
        })
        .collect();
    Ok(ModelSpec {
        name: name.to_string(),
        n,
        m,
        mu,
        density: parse_expression(density, &coords)?,
        coords,
        metric,
        ambient: lambda.map(AmbientSource::QuasiEinstein),
    })
}

const QE_TOL: f64 = 1e-12;

/// Built-in models. Chart domains: `euclidean` and `round_sphere_stereographic`
/// are defined on all of `ℝⁿ`; `hyperbolic_upper_half` needs `x_n > 0`.
///
/// * `euclidean`: `δ`, `f ≡ 1`; `λ = 0` when `m(m−1)μ = 0`.
/// * `round_sphere_stereographic`: `4(1+|x|²)⁻²δ`, `f ≡ 1`; quasi-Einstein with
///   `λ = (n−1)/(2(n+m−1))` when `m = 0` or `(m−1)μ = n−1`.
/// * `hyperbolic_upper_half`: `x_n⁻²δ`, `f ≡ 1`; `λ = −(n−1)/(2(n+m−1))` when
///   `m = 0` or `(m−1)μ = −(n−1)`.
/// * `qe_sphere`: the round sphere with `f ≡ √((m−1)μ/(n−1))`, `m > 1`, `μ > 0`.
pub fn builtin_model(name: &str, n: usize, m: f64, mu: f64) -> Result<ModelSpec> {
    if !(1..=4).contains(&n) {
        return Err(Error::invalid(format!("dimension n = {n} must be 1..=4")));
    }
    if !(m >= 0.0 && m.is_finite()) || !mu.is_finite() {
        return Err(Error::invalid(format!("need finite m >= 0 and mu, got m = {m}, mu = {mu}")));
    }
    let total = n as f64 + m;
    let r2 = (1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join("+");
    let sphere = format!("4/(1+{r2})^2");
    match name {
        "euclidean" => {
            let lambda = (m * (m - 1.0) * mu == 0.0).then_some(0.0);
            conformally_flat(name, n, m, mu, "1", "1", lambda)
        }
        "round_sphere_stereographic" => {
            let qe = m == 0.0 || ((m - 1.0) * mu - (n as f64 - 1.0)).abs() < QE_TOL;
            let lambda = qe.then(|| (n as f64 - 1.0) / (2.0 * (total - 1.0)));
            conformally_flat(name, n, m, mu, &sphere, "1", lambda)
        }
        "hyperbolic_upper_half" => {
            let qe = m == 0.0 || ((m - 1.0) * mu + (n as f64 - 1.0)).abs() < QE_TOL;
            let lambda = qe.then(|| -(n as f64 - 1.0) / (2.0 * (total - 1.0)));
            conformally_flat(name, n, m, mu, &format!("1/x{n}^2"), "1", lambda)
        }
        "qe_sphere" => {
            if n < 2 {
                return Err(Error::invalid("qe_sphere needs n >= 2"));
            }
            if !(m > 1.0) || !(mu > 0.0) {
                return Err(Error::invalid(format!(
                    "qe_sphere needs m > 1 and mu > 0 (got m = {m}, mu = {mu}); otherwise f^2 = (m-1)mu/(n-1) is not positive"
                )));
            }
            let c = ((m - 1.0) * mu / (n as f64 - 1.0)).sqrt();
            let lambda = (n as f64 - 1.0) / (2.0 * (total - 1.0));
            conformally_flat(name, n, m, mu, &sphere, &format!("{c:?}"), Some(lambda))
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

pub const BUILTIN_MODELS: [&str; 4] = [
    "euclidean",
    "round_sphere_stereographic",
    "hyperbolic_upper_half",
    "qe_sphere",
];

/// Maps `u ∈ [−1, 1]ⁿ` into the documented interior region of a built-in chart.
pub fn interior_point(name: &str, u: &[f64]) -> Vec<f64> {
    let mut p = u.to_vec();
    if name == "hyperbolic_upper_half" {
        if let Some(last) = p.last_mut() {
            *last = 1.0 + 0.5 * *last;
        }
    }
    p
}

/// `g_ρ = (1+λρ)²g`, `f_ρ = (1+λρ)f` from base values.
pub fn quasi_einstein_expansion(g: &Matrix, f: f64, lambda: f64, k: usize) -> Result<AmbientExpansion> {
    let zero = Matrix::zeros(g.nrows(), g.ncols());
    let mut gc = vec![zero; k + 1];
    let mut fc = vec![0.0; k + 1];
    gc[0] = g.clone();
    fc[0] = f;
    if k >= 1 {
        gc[1] = g * (2.0 * lambda);
        fc[1] = lambda * f;
    }
    if k >= 2 {
        gc[2] = g * (lambda * lambda);
    }
    Ok(AmbientExpansion::new(gc, fc)?.flagged_self_consistent())
}

pub fn quasi_einstein_ambient(spec: &ModelSpec, point: &[f64], k: usize) -> Result<AmbientExpansion> {
    let lambda = spec.lambda().ok_or_else(|| {
        Error::invalid(format!("model `{}` has no quasi-Einstein constant", spec.name))
    })?;
    if k < 1 {
        return Err(Error::invalid("truncation order K must be >= 1"));
    }
    quasi_einstein_expansion(&spec.metric_value(point)?, spec.density_value(point)?, lambda, k)
}

/// `g_ρ = g + 2ρP + ρ²Pg⁻¹P`, `f_ρ = f(1 + ρY/m)`.
pub fn lcf_candidate_ambient(g: &Matrix, f: f64, p: &Matrix, y: f64, m: f64, k: usize) -> Result<AmbientExpansion> {
    if !(m > 0.0) {
        return Err(Error::invalid("the LCF candidate needs m > 0"));
    }
    if k < 1 {
        return Err(Error::invalid("truncation order K must be >= 1"));
    }
    let ginv = linalg::inverse(g)?;
    let zero = Matrix::zeros(g.nrows(), g.ncols());
    let mut gc = vec![zero; k + 1];
    let mut fc = vec![0.0; k + 1];
    gc[0] = g.clone();
    gc[1] = p * 2.0;
    fc[0] = f;
    fc[1] = f * y / m;
    if k >= 2 {
        gc[2] = linalg::symmetrize(&(p * &ginv * p));
    }
    Ok(AmbientExpansion::new(gc, fc)?.flagged_self_consistent())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpace {
    name: Option<String>,
    n: usize,
    m: f64,
    #[serde(default)]
    mu: f64,
    coords: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDensity {
    f: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileAmbient {
    lambda: Option<f64>,
    coefficients: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    space: FileSpace,
    metric: BTreeMap<String, String>,
    density: Option<FileDensity>,
    ambient: Option<FileAmbient>,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

fn parse_component_key(key: &str, n: usize) -> Option<(usize, usize)> {
    let digits = key.strip_prefix('g')?;
    let (i, j) = match digits.split_once('_') {
        Some((a, b)) => (a.parse().ok()?, b.parse().ok()?),
        None if digits.len() == 2 => (
            digits[..1].parse::<usize>().ok()?,
            digits[1..].parse::<usize>().ok()?,
        ),
        None => return None,
    };
    ((1..=n).contains(&i) && (1..=n).contains(&j)).then(|| (i - 1, j - 1))
}

/// Parses a model file; relative coefficient paths resolve against `path`'s directory.
pub fn parse_model_file(text: &str, path: &Path) -> Result<ModelSpec> {
    let fmt_err = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file: ModelFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of_offset(text, s.start));
        fmt_err(line, e.message().to_string())
    })?;
    let n = file.space.n;
    if !(1..=4).contains(&n) {
        return Err(fmt_err(line_of_key(text, "n"), format!("n = {n} must be 1..=4")));
    }
    if !(file.space.m >= 0.0) {
        return Err(fmt_err(line_of_key(text, "m"), "m must be >= 0".into()));
    }
    let coords = file.space.coords.unwrap_or_else(|| coordinate_names(n));
    if coords.len() != n {
        return Err(fmt_err(
            line_of_key(text, "coords"),
            format!("{} coordinate names for n = {n}", coords.len()),
        ));
    }
    let reserved = ["pi", "sin", "cos", "exp", "log", "sqrt", "pow"];
    for c in &coords {
        let valid = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
            && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
        if !valid || reserved.contains(&c.as_str()) {
            return Err(fmt_err(line_of_key(text, "coords"), format!("invalid coordinate name `{c}`")));
        }
    }
    let parse = |key: &str, src: &str| {
        parse_expression(src, &coords)
            .map_err(|e| fmt_err(line_of_key(text, key), format!("{key}: {e}")))
    };

    let mut metric: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
    for (key, src) in &file.metric {
        let (i, j) = parse_component_key(key, n)
            .ok_or_else(|| fmt_err(line_of_key(text, key), format!("`{key}` is not a metric component g<i><j> with 1 <= i, j <= {n}")))?;
        let e = parse(key, src)?;
        for (a, b) in [(i, j), (j, i)] {
            if let Some(prev) = &metric[a][b] {
                if *prev != e {
                    return Err(fmt_err(line_of_key(text, key), format!("`{key}` conflicts with its transpose")));
                }
            }
            metric[a][b] = Some(e.clone());
        }
    }
    let mut table = Vec::with_capacity(n);
    for (i, row) in metric.into_iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (j, e) in row.into_iter().enumerate() {
            match e {
                Some(e) => out.push(e),
                None if i == j => {
                    return Err(fmt_err(0, format!("missing diagonal component g{}{}", i + 1, j + 1)))
                }
                None => out.push(Expr::Num(0.0)),
            }
        }
        table.push(out);
    }
    let density = match &file.density {
        Some(d) => parse("f", &d.f)?,
        None => Expr::Num(1.0),
    };
    let ambient = match file.ambient {
        None => None,
        Some(FileAmbient { lambda: Some(_), coefficients: Some(_) }) => {
            return Err(fmt_err(line_of_key(text, "lambda"), "give either lambda or coefficients, not both".into()))
        }
        Some(FileAmbient { lambda: Some(l), .. }) => Some(AmbientSource::QuasiEinstein(l)),
        Some(FileAmbient { coefficients: Some(c), .. }) => {
            let p = PathBuf::from(&c);
            let resolved = if p.is_relative() {
                path.parent().map_or(p.clone(), |d| d.join(&p))
            } else {
                p
            };
            Some(AmbientSource::Coefficients(resolved))
        }
        Some(_) => None,
    };
    Ok(ModelSpec {
        name: file
            .space
            .name
            .unwrap_or_else(|| path.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned())),
        n,
        m: file.space.m,
        mu: file.space.mu,
        coords,
        metric: table,
        density,
        ambient,
    })
}

pub fn read_model_file(path: &Path) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_model_file(&text, path)
}

/// A built-in name or a path to a model file.
pub fn resolve_model(name_or_path: &str, n: usize, m: f64, mu: f64) -> Result<ModelSpec> {
    if BUILTIN_MODELS.contains(&name_or_path) {
        return builtin_model(name_or_path, n, m, mu);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return read_model_file(path);
    }
    Err(Error::UnknownModel(name_or_path.to_string()))
}
