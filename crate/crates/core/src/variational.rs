//! Integrals of weighted renormalized volume coefficients over `S²`/`S³`
//! models and their conformal variations.

use std::fmt;

use rayon::prelude::*;

use crate::ambient::{self, AmbientExpansion};
use crate::chart;
use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr};
use crate::jet::Jet;
use crate::linalg::{self, Matrix};
use crate::models::{self, ModelSpec};
use crate::quadrature::{Chart, QuadratureGrid};
use crate::weighted::{self, binomial, MetricMeasurePoint, WeightedInvariants};

/// Tolerance on `∫ω dvol_φ` for admissible variations.
pub const MEAN_ZERO_TOL: f64 = 1e-8;
/// Tolerance for quadrature-dependent comparisons.
pub const QUADRATURE_TOL: f64 = 1e-6;
const SPHERE_METRIC_TOL: f64 = 1e-10;

/// Source of the ambient expansion at each node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    QuasiEinstein(f64),
    /// `g + 2ρP + ρ²Pg⁻¹P`, `f(1 + ρY/m)` from the local weighted invariants.
    LcfCandidate,
}

#[derive(Debug, Clone)]
pub struct NodeData {
    pub chart: Chart,
    pub point: Vec<f64>,
    /// Grid coordinate weight times `√det g · f^m`.
    pub weight: f64,
    pub structure: MetricMeasurePoint,
    pub invariants: WeightedInvariants,
}

/// A model on a sphere grid with everything needed per node precomputed.
#[derive(Debug, Clone)]
pub struct SphereModel {
    pub spec: ModelSpec,
    pub grid: QuadratureGrid,
    pub generator: Option<Generator>,
    pub nodes: Vec<NodeData>,
    threads: usize,
}

/// Maps `f` over `items`, on a dedicated pool when `threads > 1`; the output
/// order always matches the input order.
pub fn par_map<T, U, F>(threads: usize, items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    if threads <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(f).collect())
}

fn round_metric(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    4.0 / ((1.0 + r2) * (1.0 + r2))
}

impl SphereModel {
    pub fn new(spec: ModelSpec, grid: QuadratureGrid, generator: Option<Generator>, threads: usize) -> Result<Self> {
        if spec.n != grid.n {
            return Err(Error::DimensionMismatch(spec.n, grid.n));
        }
        if let Some(Generator::LcfCandidate) = generator {
            if !(spec.m > 0.0) {
                return Err(Error::invalid("the LCF-candidate generator needs m > 0"));
            }
        }
        let nodes = par_map(threads, &grid.nodes, |nd| {
            let structure = spec.structure_at(&nd.point, 2)?;
            let g = structure.metric().value();
            let round = round_metric(&nd.point);
            let dev = linalg::max_abs(&(&g - Matrix::identity(spec.n, spec.n) * round));
            if dev > SPHERE_METRIC_TOL * round {
                return Err(Error::invalid(format!(
                    "model `{}` is not the unit round metric in stereographic coordinates at {:?}",
                    spec.name, nd.point
                )));
            }
            let f = structure.density().value();
            let fm = if spec.m == 0.0 { 1.0 } else { f.powf(spec.m) };
            let invariants = weighted::weighted_invariants(&structure)?;
            Ok(NodeData {
                chart: nd.chart,
                point: nd.point.clone(),
                weight: nd.coord_weight * structure.metric().det_value().sqrt() * fm,
                structure,
                invariants,
            })
        })?;
        Ok(SphereModel {
            spec,
            grid,
            generator,
            nodes,
            threads,
        })
    }

    /// Uses the model's quasi-Einstein constant as generator when it has one.
    pub fn from_spec(spec: ModelSpec, grid: QuadratureGrid, threads: usize) -> Result<Self> {
        let generator = spec.lambda().map(Generator::QuasiEinstein);
        SphereModel::new(spec, grid, generator, threads)
    }

    pub fn total_dim(&self) -> f64 {
        self.spec.n as f64 + self.spec.m
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    fn lambda(&self) -> Result<f64> {
        match self.generator {
            Some(Generator::QuasiEinstein(l)) => Ok(l),
            _ => Err(Error::invalid(format!(
                "model `{}` is not quasi-Einstein; this computation needs the closed-form ambient space",
                self.spec.name
            ))),
        }
    }

    fn expansion(&self, node: &NodeData, k: usize) -> Result<AmbientExpansion> {
        let w = &node.invariants;
        let f = node.structure.density().value();
        match self.generator {
            Some(Generator::QuasiEinstein(l)) => models::quasi_einstein_expansion(&w.metric, f, l, k),
            Some(Generator::LcfCandidate) => {
                models::lcf_candidate_ambient(&w.metric, f, &w.schouten, w.y, self.spec.m, k)
            }
            None => Err(Error::invalid(format!(
                "model `{}` has no ambient generator",
                self.spec.name
            ))),
        }
    }

    /// `v_k` at every node.
    pub fn vk_field(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        par_map(self.threads, &self.nodes, |nd| {
            let a = self.expansion(nd, k)?;
            Ok(ambient::volume_coefficients(&a, self.spec.m)?.v[k - 1])
        })
    }

    /// `L_k` at every node.
    pub fn l_field(&self, k: usize) -> Result<Vec<Matrix>> {
        par_map(self.threads, &self.nodes, |nd| {
            ambient::l_operator(&self.expansion(nd, k)?, self.spec.m, k)
        })
    }

    fn integrate(&self, values: impl Iterator<Item = f64>) -> f64 {
        self.nodes.iter().zip(values).map(|(nd, v)| nd.weight * v).sum()
    }
}

/// Trial function on the sphere given in embedding coordinates `X1 … X{n+1}`.
#[derive(Debug, Clone)]
pub struct Trial {
    pub text: String,
    expr: Expr,
}

impl Trial {
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let vars: Vec<String> = (1..=n + 1).map(|i| format!("X{i}")).collect();
        Ok(Trial {
            text: text.to_string(),
            expr: parse_expression(text, &vars)?,
        })
    }
}

/// Samples of a trial at the nodes of a [`SphereModel`].
#[derive(Debug, Clone)]
pub struct TrialField {
    pub text: String,
    pub values: Vec<f64>,
    /// Chart-coordinate gradients.
    pub grads: Vec<Vec<f64>>,
    pub grad_norm2: Vec<f64>,
    pub weighted_laplacian: Vec<f64>,
}

fn embedding_jets(chart: Chart, point: &[f64], order: usize) -> Result<Vec<Jet>> {
    let x = Jet::variables(point, order)?;
    let r2 = x.iter().skip(1).fold(&x[0] * &x[0], |acc, v| &acc + &(v * v));
    let inv = (&r2 + 1.0).recip()?;
    let mut out: Vec<Jet> = x.iter().map(|v| (v * &inv).scale(2.0)).collect();
    let last = match chart {
        Chart::North => &(r2.clone() - 1.0) * &inv,
        Chart::South => &(-&r2 + 1.0) * &inv,
    };
    out.push(last);
    Ok(out)
}

pub fn sample_trial(model: &SphereModel, trial: &Trial) -> Result<TrialField> {
    let samples = par_map(model.threads, &model.nodes, |nd| {
        let emb = embedding_jets(nd.chart, &nd.point, 2)?;
        let w = trial.expr.eval_jet(&emb)?;
        let gam = chart::christoffel(nd.structure.metric())?;
        let phi = nd.structure.phi()?;
        Ok((
            w.value(),
            chart::gradient(&w),
            chart::inner_grad_with(&w, &w, gam.inverse_metric())?,
            chart::weighted_laplacian_with(&w, &phi, &gam)?,
        ))
    })?;
    let mut field = TrialField {
        text: trial.text.clone(),
        values: Vec::with_capacity(samples.len()),
        grads: Vec::with_capacity(samples.len()),
        grad_norm2: Vec::with_capacity(samples.len()),
        weighted_laplacian: Vec::with_capacity(samples.len()),
    };
    for (v, g, g2, l) in samples {
        field.values.push(v);
        field.grads.push(g);
        field.grad_norm2.push(g2);
        field.weighted_laplacian.push(l);
    }
    Ok(field)
}

impl TrialField {
    /// `∫ω dvol_φ`.
    pub fn mean_integral(&self, model: &SphereModel) -> f64 {
        model.integrate(self.values.iter().copied())
    }

    /// Subtracts the weighted mean.
    pub fn project_mean_zero(&self, model: &SphereModel) -> Result<TrialField> {
        let mean = self.mean_integral(model) / weighted_volume(model);
        let mut out = self.clone();
        for v in &mut out.values {
            *v -= mean;
        }
        let residual = out.mean_integral(model);
        if residual.abs() > MEAN_ZERO_TOL {
            return Err(Error::Constraint(format!(
                "projected trial `{}` still has mean integral {residual:e}",
                self.text
            )));
        }
        Ok(out)
    }

    fn check_mean_zero(&self, model: &SphereModel) -> Result<()> {
        let mean = self.mean_integral(model);
        if mean.abs() > MEAN_ZERO_TOL {
            return Err(Error::Constraint(format!(
                "trial `{}` has ∫ω dvol_φ = {mean:e}, beyond {MEAN_ZERO_TOL:e}",
                self.text
            )));
        }
        Ok(())
    }

    /// `∫|∇ω|² dvol_φ / ∫ω² dvol_φ`.
    pub fn rayleigh_quotient(&self, model: &SphereModel) -> f64 {
        let num = model.integrate(self.grad_norm2.iter().copied());
        let den = model.integrate(self.values.iter().map(|v| v * v));
        num / den
    }
}

/// `∫ f^m dvol_g`.
pub fn weighted_volume(model: &SphereModel) -> f64 {
    model.integrate(std::iter::repeat(1.0))
}

/// `F_k = ∫ v_k dvol_φ`.
pub fn functional_f_k(model: &SphereModel, k: usize) -> Result<f64> {
    Ok(model.integrate(model.vk_field(k)?.into_iter()))
}

/// `(n+m−2k) ∫ v_k ω dvol_φ`.
pub fn first_variation(model: &SphereModel, k: usize, omega: &TrialField) -> Result<f64> {
    let vk = model.vk_field(k)?;
    let factor = model.total_dim() - 2.0 * k as f64;
    Ok(factor * model.integrate(vk.iter().zip(&omega.values).map(|(v, w)| v * w)))
}

/// `|∫ s_k Δ_φω dvol_φ|` where `L_k = s_k g⁻¹` at a quasi-Einstein model; the
/// divergence term must integrate to zero.
pub fn delta_vk_identity_check(model: &SphereModel, k: usize, omega: &TrialField) -> Result<f64> {
    model.lambda()?;
    let n = model.spec.n as f64;
    let l = model.l_field(k)?;
    let s = model
        .nodes
        .iter()
        .zip(&l)
        .map(|(nd, lk)| (&nd.invariants.metric * lk).trace() / n);
    Ok(model
        .integrate(s.zip(&omega.weighted_laplacian).map(|(s, d)| s * d))
        .abs())
}

/// `c_k = (n+m−2k) C(n+m−1, k−1)`.
pub fn c_k(total_dim: f64, k: usize) -> f64 {
    (total_dim - 2.0 * k as f64) * binomial(total_dim - 1.0, k - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
}

impl Sign {
    pub fn of(x: f64, tol: f64) -> Sign {
        if x > tol {
            Sign::Positive
        } else if x < -tol {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Zero => "zero",
        })
    }
}

/// Sign of the second variation on mean-zero variations at a quasi-Einstein
/// structure, from the case table in `k` versus `(n+m)/2`, the sign of `J` and
/// the parity of `k`. Needs `1 ≤ k < n+m`.
pub fn predicted_sign(total_dim: f64, k: usize, j_sign: Sign) -> Result<Sign> {
    let kf = k as f64;
    if k == 0 || kf >= total_dim {
        return Err(Error::invalid(format!("need 1 <= k < n+m = {total_dim}, got k = {k}")));
    }
    let half = total_dim / 2.0;
    if kf == half || j_sign == Sign::Zero {
        return Ok(Sign::Zero);
    }
    let odd = k % 2 == 1;
    let below = kf < half;
    Ok(match (below, j_sign, odd) {
        (true, Sign::Positive, _) => Sign::Positive,
        (true, _, true) => Sign::Positive,
        (true, _, false) => Sign::Negative,
        (false, Sign::Positive, _) => Sign::Negative,
        (false, _, true) => Sign::Negative,
        (false, _, false) => Sign::Positive,
    })
}

/// Sign of `c_k λ^{k−1}` times a positive integral, used when `λ < 0` makes
/// `|∇ω|² − 2(n+m)λω²` pointwise non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignDecomposition {
    pub c_k: f64,
    pub lambda_power: f64,
    pub integrand_nonnegative: bool,
    pub sign: Option<Sign>,
}

pub fn reduced_sign_decomposition(total_dim: f64, k: usize, lambda: f64) -> SignDecomposition {
    let c = c_k(total_dim, k);
    let lp = lambda.powi(k as i32 - 1);
    let nonneg = lambda <= 0.0;
    SignDecomposition {
        c_k: c,
        lambda_power: lp,
        integrand_nonnegative: nonneg,
        sign: nonneg.then(|| Sign::of(c * lp, 0.0)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalReport {
    pub model: String,
    pub trial: String,
    pub k: usize,
    pub weighted_volume: f64,
    pub f_k: f64,
    pub first_variation: f64,
    pub q_general: f64,
    pub q_reduced: f64,
    pub paths_agree: bool,
    pub c_k: f64,
    pub lambda: f64,
    pub lambda1_estimate: f64,
    pub observed_sign: Sign,
    pub predicted_sign: Sign,
}

impl FunctionalReport {
    pub const FIELDS: [&'static str; 14] = [
        "model",
        "trial",
        "k",
        "weighted_volume",
        "F_k",
        "first_variation",
        "Q_general",
        "Q_reduced",
        "paths_agree",
        "c_k",
        "lambda",
        "lambda1_estimate",
        "observed_sign",
        "predicted_sign",
    ];

    pub fn values(&self) -> Vec<String> {
        vec![
            self.model.clone(),
            self.trial.clone(),
            self.k.to_string(),
            format_float(self.weighted_volume),
            format_float(self.f_k),
            format_float(self.first_variation),
            format_float(self.q_general),
            format_float(self.q_reduced),
            self.paths_agree.to_string(),
            format_float(self.c_k),
            format_float(self.lambda),
            format_float(self.lambda1_estimate),
            self.observed_sign.to_string(),
            self.predicted_sign.to_string(),
        ]
    }

    /// `key: value` lines.
    pub fn to_key_value(&self) -> String {
        Self::FIELDS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect()
    }

    pub fn csv_header() -> String {
        Self::FIELDS.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        self.values()
            .into_iter()
            .map(|v| {
                if v.contains([',', '"', '\n']) {
                    format!("\"{}\"", v.replace('"', "\"\""))
                } else {
                    v
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Seventeen significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Evaluates the second variation by the general form
/// `−(n+m−2k)∫[2k v_k ω² + L_k^{ij}∂_iω∂_jω]` and the reduced form
/// `c_k λ^{k−1}∫(|∇ω|² − 2(n+m)λω²)`.
pub fn second_variation(model: &SphereModel, k: usize, omega: &TrialField) -> Result<FunctionalReport> {
    let lambda = model.lambda()?;
    if lambda == 0.0 {
        return Err(Error::invalid("the second variation needs lambda != 0"));
    }
    let total = model.total_dim();
    if k == 0 || k as f64 >= total {
        return Err(Error::invalid(format!("need 1 <= k < n+m = {total}, got k = {k}")));
    }
    omega.check_mean_zero(model)?;
    let vk = model.vk_field(k)?;
    let lk = model.l_field(k)?;
    let kf = k as f64;
    let general = -(total - 2.0 * kf)
        * model.integrate((0..model.nodes.len()).map(|i| {
            let w = omega.values[i];
            let g = nalgebra::DVector::from_column_slice(&omega.grads[i]);
            2.0 * kf * vk[i] * w * w + (g.transpose() * &lk[i] * &g)[(0, 0)]
        }));
    let ck = c_k(total, k);
    let reduced = ck
        * lambda.powi(k as i32 - 1)
        * model.integrate(
            omega
                .grad_norm2
                .iter()
                .zip(&omega.values)
                .map(|(g2, w)| g2 - 2.0 * total * lambda * w * w),
        );
    let scale = general.abs().max(reduced.abs()).max(1.0);
    let j_sign = Sign::of(model.nodes[0].invariants.j, 0.0);
    Ok(FunctionalReport {
        model: model.spec.name.clone(),
        trial: omega.text.clone(),
        k,
        weighted_volume: weighted_volume(model),
        f_k: model.integrate(vk.iter().copied()),
        first_variation: (total - 2.0 * kf) * model.integrate(vk.iter().zip(&omega.values).map(|(v, w)| v * w)),
        q_general: general,
        q_reduced: reduced,
        paths_agree: (general - reduced).abs() <= QUADRATURE_TOL * scale,
        c_k: ck,
        lambda,
        lambda1_estimate: omega.rayleigh_quotient(model),
        observed_sign: Sign::of(general, 1e-10 * scale),
        predicted_sign: predicted_sign(total, k, j_sign)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueReport {
    pub quotients: Vec<f64>,
    pub min_quotient: f64,
    pub bound: f64,
    /// `min over nodes` of the smallest eigenvalue of `g⁻¹Ric_φ − 2(n+m−1)λ`.
    pub ricci_margin: f64,
    pub strict_expected: bool,
    pub holds: bool,
    pub equality: bool,
}

/// Rayleigh quotients of mean-zero trials against `2(n+m)λ`.
pub fn eigenvalue_bound_check(model: &SphereModel, trials: &[TrialField]) -> Result<EigenvalueReport> {
    let lambda = model.lambda()?;
    if trials.is_empty() {
        return Err(Error::invalid("need at least one trial function"));
    }
    let total = model.total_dim();
    let floor = 2.0 * (total - 1.0) * lambda;
    let mut ricci_margin = f64::INFINITY;
    for nd in &model.nodes {
        let w = &nd.invariants;
        let ev = linalg::relative_eigenvalues(&w.metric, &w.ric_phi)?;
        ricci_margin = ricci_margin.min(ev[0] - floor);
    }
    if ricci_margin < -1e-9 {
        return Err(Error::Constraint(format!(
            "Ric_phi >= 2(n+m-1) lambda g fails by {:e}",
            -ricci_margin
        )));
    }
    let mut quotients = Vec::with_capacity(trials.len());
    for t in trials {
        t.check_mean_zero(model)?;
        quotients.push(t.rayleigh_quotient(model));
    }
    let min_quotient = quotients.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = 2.0 * total * lambda;
    let strict_expected = model.spec.m > 0.0;
    let equality = (min_quotient - bound).abs() <= QUADRATURE_TOL;
    let holds = if strict_expected {
        min_quotient > bound + QUADRATURE_TOL
    } else {
        min_quotient >= bound - QUADRATURE_TOL
    };
    Ok(EigenvalueReport {
        quotients,
        min_quotient,
        bound,
        ricci_margin,
        strict_expected,
        holds,
        equality,
    })
}
