mod report;
mod suites;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wrvc::ambient::{self, volume_coefficients};
use wrvc::models::{interior_point, resolve_model, ModelSpec};
use wrvc::quadrature::{QuadratureConfig, QuadratureGrid};
use wrvc::variational::{sample_trial, second_variation, FunctionalReport, SphereModel, Trial};
use wrvc::weighted;

use report::{ModelInfo, Report, Value};
use suites::Suite;

const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser)]
#[command(name = "wrvc", version, about = "Weighted curvature invariants and renormalized volume coefficients")]
struct Cli {
    /// Worker threads for node-wise evaluation.
    #[arg(long, global = true, env = "WRVC_THREADS", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    /// Emit one JSON document instead of aligned text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted curvature invariants at a chart point.
    Curvature(CurvatureArgs),
    /// Volume coefficients v_1..v_K and obstruction norms.
    Vk(VkArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// First and second variation of the volume functionals on a sphere model.
    Variational(VariationalArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in model name or path to a model file.
    #[arg(long)]
    model: String,
    /// Dimension for built-in models.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated chart coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Args)]
struct VkArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Truncation order K.
    #[arg(long)]
    order: usize,
    /// Chart point; defaults to a central point of the chart.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct VariationalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Orders k, comma-separated; more than one gives CSV output.
    #[arg(long, default_value = "1")]
    k: String,
    /// Trial function in the embedding coordinates X1..X{n+1}; projected to mean zero.
    #[arg(long, default_value = "X1")]
    trial: String,
    #[arg(long, default_value_t = QuadratureConfig::default().radial)]
    radial: usize,
    #[arg(long, default_value_t = QuadratureConfig::default().polar)]
    polar: usize,
    #[arg(long, default_value_t = QuadratureConfig::default().azimuthal)]
    azimuthal: usize,
}

fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .enumerate()
        .map(|(i, tok)| {
            let tok = tok.trim();
            tok.parse::<T>()
                .map_err(|_| format!("invalid --{flag}: component {} `{tok}` is not a valid number", i + 1))
        })
        .collect()
}

fn parse_point(text: &str, n: usize) -> Result<Vec<f64>, String> {
    let point: Vec<f64> = parse_list("point", text)?;
    if let Some(i) = point.iter().position(|x| !x.is_finite()) {
        return Err(format!("invalid --point: component {} is not finite", i + 1));
    }
    if point.len() != n {
        return Err(format!("invalid --point: expected {n} coordinates, got {}", point.len()));
    }
    Ok(point)
}

fn load_model(args: &ModelArgs) -> Result<ModelSpec, String> {
    resolve_model(&args.model, args.n, args.m, args.mu).map_err(|e| e.to_string())
}

fn model_info(spec: &ModelSpec) -> ModelInfo {
    ModelInfo {
        name: spec.name.clone(),
        n: spec.n,
        m: spec.m,
        mu: spec.mu,
    }
}

fn cmd_curvature(args: &CurvatureArgs, mut report: Report) -> Result<Report, String> {
    let spec = load_model(&args.model)?;
    let point = parse_point(&args.point, spec.n)?;
    let structure = spec.structure_at(&point, 2).map_err(|e| e.to_string())?;
    let w = weighted::weighted_invariants(&structure).map_err(|e| e.to_string())?;
    let (lambda, residual) = weighted::quasi_einstein_residual(&w, &w.metric, spec.n, spec.m);
    report.model = Some(model_info(&spec));
    report.push("point", Value::Vector(point));
    report.push("Ric_phi", &w.ric_phi);
    report.push("R_phi", w.r_phi);
    report.push("P", &w.schouten);
    report.push("J", w.j);
    report.push("Y", w.y);
    report.push("F_phi", w.f_phi);
    report.push("lambda", lambda);
    report.push("quasi_einstein_residual", residual);
    Ok(report)
}

fn cmd_vk(args: &VkArgs, mut report: Report) -> Result<Report, String> {
    let spec = load_model(&args.model)?;
    let point = match &args.point {
        Some(text) => parse_point(text, spec.n)?,
        None => interior_point(&spec.name, &vec![0.0; spec.n]),
    };
    if args.order == 0 {
        return Err("--order must be at least 1".into());
    }
    let a = spec.ambient_expansion(&point, args.order).map_err(|e| e.to_string())?;
    let v = volume_coefficients(&a, spec.m).map_err(|e| e.to_string())?;
    let norms = suites::obstruction_norms(&a).map_err(|e| e.to_string())?;
    report.model = Some(model_info(&spec));
    report.push("point", Value::Vector(point));
    report.push("order", Value::Int(args.order as i64));
    for (k, x) in v.v.iter().enumerate() {
        report.push(format!("v{}", k + 1), *x);
    }
    for (k, x) in norms.iter().enumerate() {
        report.push(format!("|Omega{}|", k + 1), *x);
    }
    if spec.m > 0.0 && args.order >= 2 {
        let r = ambient::f_second_residual(&a, spec.m).map_err(|e| e.to_string())?;
        report.push("f2_residual", r);
    }
    Ok(report)
}

fn cmd_verify(args: &VerifyArgs, threads: usize, mut report: Report) -> Result<Report, String> {
    report.seed = Some(args.seed);
    report.push("suite", Value::Text(args.suite.name().into()));
    report.checks = suites::run(args.suite, args.seed, threads).map_err(|e| e.to_string())?;
    Ok(report)
}

fn cmd_variational(args: &VariationalArgs, threads: usize, json: bool, mut report: Report) -> Result<Report, String> {
    let spec = load_model(&args.model)?;
    let ks: Vec<usize> = parse_list("k", &args.k)?;
    let config = QuadratureConfig {
        radial: args.radial,
        polar: args.polar,
        azimuthal: args.azimuthal,
    };
    let grid = QuadratureGrid::new(spec.n, config).map_err(|e| e.to_string())?;
    report.model = Some(model_info(&spec));
    let model = SphereModel::from_spec(spec, grid, threads).map_err(|e| e.to_string())?;
    let trial = Trial::parse(&args.trial, model.spec.n).map_err(|e| format!("--trial: {e}"))?;
    let omega = sample_trial(&model, &trial)
        .and_then(|t| t.project_mean_zero(&model))
        .map_err(|e| e.to_string())?;
    let rows = ks
        .iter()
        .map(|&k| second_variation(&model, k, &omega))
        .collect::<Result<Vec<FunctionalReport>, _>>()
        .map_err(|e| e.to_string())?;
    if json {
        for r in &rows {
            for (key, value) in FunctionalReport::FIELDS.iter().zip(r.values()) {
                let v = match *key {
                    "model" | "trial" | "observed_sign" | "predicted_sign" => Value::Text(value),
                    "k" => Value::Int(r.k as i64),
                    "paths_agree" => Value::Bool(r.paths_agree),
                    _ => Value::Float(value.parse().unwrap_or(f64::NAN)),
                };
                report.push(format!("k{}.{key}", r.k), v);
            }
        }
    } else if rows.len() == 1 {
        report.text_body = Some(rows[0].to_key_value());
        report.bare = true;
    } else {
        let mut csv = FunctionalReport::csv_header();
        csv.push('\n');
        for r in &rows {
            csv.push_str(&r.to_csv_row());
            csv.push('\n');
        }
        report.text_body = Some(csv);
        report.bare = true;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::iter::once("wrvc".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    let report = Report::new(command);
    let threads = usize::from(cli.threads);
    let result = match &cli.command {
        Command::Curvature(a) => cmd_curvature(a, report),
        Command::Vk(a) => cmd_vk(a, report),
        Command::Verify(a) => cmd_verify(a, threads, report),
        Command::Variational(a) => cmd_variational(a, threads, cli.json, report),
    };
    match result {
        Ok(report) => {
            let text = if cli.json {
                report.render_json()
            } else {
                report.render_text()
            };
            print!("{text}");
            ExitCode::from(report.exit_status() as u8)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
