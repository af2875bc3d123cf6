//! Quadrature on the unit spheres `S²` and `S³`.
//!
//! The sphere is covered by two stereographic charts related by `x′ = x/|x|²`.
//! A smooth partition of unity `χ(r) + χ(1/r) = 1` splits every integrand
//! between them, so each chart only sees the ball `|x| ≤ β`. Inside a chart
//! the integral is taken in polar coordinates: Gauss–Legendre in `r` on
//! `[0, 1/β]`, Gauss–Legendre in `t = log_β r` on `[−1, 1]` where `χ` is a
//! polynomial in `t`, Gauss–Legendre in `cos θ` and the trapezoid rule in the
//! periodic angle. Every panel integrand is analytic, so the rule converges
//! geometrically.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Outer radius of each chart's support.
pub const CHART_RADIUS: f64 = 2.0;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

/// Quintic smooth step with `H(−1) = 0`, `H(1) = 1`, `H(t) + H(−t) = 1`.
fn smooth_step(t: f64) -> f64 {
    let u = (0.5 * (t + 1.0)).clamp(0.0, 1.0);
    u * u * u * (10.0 + u * (6.0 * u - 15.0))
}

/// Partition weight of a chart point at radius `r`; `χ(r) + χ(1/r) = 1`.
pub fn partition(r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    smooth_step(-r.ln() / CHART_RADIUS.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Coordinates `x` with `X = (2x, |x|² − 1)/(1 + |x|²)`.
    North,
    /// Coordinates `x` with `X = (2x, 1 − |x|²)/(1 + |x|²)`.
    South,
}

impl Chart {
    /// Embedding of a chart point into `ℝ^{n+1}`.
    pub fn embed(self, x: &[f64]) -> Vec<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let d = 1.0 + r2;
        let mut out: Vec<f64> = x.iter().map(|v| 2.0 * v / d).collect();
        out.push(match self {
            Chart::North => (r2 - 1.0) / d,
            Chart::South => (1.0 - r2) / d,
        });
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub chart: Chart,
    pub point: Vec<f64>,
    pub embedding: Vec<f64>,
    /// Coordinate weight times the partition function.
    pub coord_weight: f64,
    /// `coord_weight` times the round volume density `(2/(1+|x|²))ⁿ`.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per radial panel.
    pub radial: usize,
    /// Gauss–Legendre nodes in `cos θ` (`S³` only).
    pub polar: usize,
    /// Trapezoid nodes in the periodic angle.
    pub azimuthal: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            radial: 16,
            polar: 10,
            azimuthal: 20,
        }
    }
}

impl QuadratureConfig {
    pub fn refined(self, factor: usize) -> Self {
        QuadratureConfig {
            radial: self.radial * factor,
            polar: self.polar * factor,
            azimuthal: self.azimuthal * factor,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub n: usize,
    pub config: QuadratureConfig,
    pub nodes: Vec<Node>,
}

fn directions(n: usize, cfg: &QuadratureConfig) -> Vec<(Vec<f64>, f64)> {
    let dphi = 2.0 * PI / cfg.azimuthal as f64;
    let phis: Vec<f64> = (0..cfg.azimuthal).map(|j| (j as f64 + 0.5) * dphi).collect();
    match n {
        2 => phis.iter().map(|p| (vec![p.cos(), p.sin()], dphi)).collect(),
        _ => {
            let (ct, wt) = gauss_legendre(cfg.polar);
            let mut out = Vec::with_capacity(cfg.polar * cfg.azimuthal);
            for (c, w) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for p in &phis {
                    out.push((vec![s * p.cos(), s * p.sin(), *c], w * dphi));
                }
            }
            out
        }
    }
}

impl QuadratureGrid {
    pub fn new(n: usize, config: QuadratureConfig) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::invalid(format!("sphere quadrature supports n = 2 or 3, got {n}")));
        }
        if config.radial == 0 || config.azimuthal == 0 || (n == 3 && config.polar == 0) {
            return Err(Error::invalid("quadrature resolutions must be positive"));
        }
        let (gx, gw) = gauss_legendre(config.radial);
        let inner = 1.0 / CHART_RADIUS;
        let mut radial = Vec::with_capacity(2 * config.radial);
        for (x, w) in gx.iter().zip(&gw) {
            radial.push((0.5 * inner * (x + 1.0), 0.5 * inner * w));
        }
        let log_beta = CHART_RADIUS.ln();
        for (t, w) in gx.iter().zip(&gw) {
            let r = CHART_RADIUS.powf(*t);
            radial.push((r, w * r * log_beta));
        }
        let dirs = directions(n, &config);
        let mut nodes = Vec::with_capacity(2 * radial.len() * dirs.len());
        for chart in [Chart::North, Chart::South] {
            for &(r, wr) in &radial {
                let chi = partition(r);
                if chi == 0.0 {
                    continue;
                }
                let radial_weight = wr * r.powi(n as i32 - 1) * chi;
                let density = (2.0 / (1.0 + r * r)).powi(n as i32);
                for (dir, wd) in &dirs {
                    let point: Vec<f64> = dir.iter().map(|d| r * d).collect();
                    let coord_weight = radial_weight * wd;
                    nodes.push(Node {
                        chart,
                        embedding: chart.embed(&point),
                        point,
                        coord_weight,
                        weight: coord_weight * density,
                    });
                }
            }
        }
        Ok(QuadratureGrid { n, config, nodes })
    }

    pub fn with_default(n: usize) -> Result<Self> {
        QuadratureGrid::new(n, QuadratureConfig::default())
    }

    /// `Σ weight·h(node)` for a function of the embedding coordinates.
    pub fn integrate(&self, h: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().map(|nd| nd.weight * h(&nd.embedding)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|nd| nd.weight).sum()
    }
}

/// `Vol(Sⁿ(1))`.
pub fn sphere_volume(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * sphere_volume(n - 2) / (n as f64 - 1.0),
    }
}

/// `log₂(|e(coarse)| / |e(2·coarse)|)` for the errors of a grid functional.
pub fn observed_order(
    n: usize,
    coarse: QuadratureConfig,
    exact: f64,
    functional: impl Fn(&QuadratureGrid) -> Result<f64>,
) -> Result<f64> {
    let e1 = (functional(&QuadratureGrid::new(n, coarse)?)? - exact).abs();
    let e2 = (functional(&QuadratureGrid::new(n, coarse.refined(2))?)? - exact).abs();
    Ok((e1 / e2.max(f64::MIN_POSITIVE)).log2())
}
