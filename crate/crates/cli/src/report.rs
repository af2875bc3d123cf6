//! The structured document every command emits.

use std::fmt::Write;

use wrvc::linalg::Matrix;

/// Seventeen significant digits; non-finite values are spelled out.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<&Matrix> for Value {
    fn from(a: &Matrix) -> Self {
        Value::Matrix((0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelInfo {
    pub name: String,
    pub n: usize,
    pub m: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub model: Option<ModelInfo>,
    pub seed: Option<u64>,
    pub payload: Vec<(String, Value)>,
    pub checks: Vec<Check>,
    /// Pre-rendered plain-text body, used instead of the payload table.
    pub text_body: Option<String>,
    /// Plain text is the body alone, without header or trailer lines.
    pub bare: bool,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report {
            command,
            ..Report::default()
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.payload.push((key.into(), value.into()));
    }

    pub fn exit_status(&self) -> i32 {
        if self.checks.iter().all(|c| c.passed) {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        if self.bare {
            return self.text_body.clone().unwrap_or_default();
        }
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(m) = &self.model {
            let _ = writeln!(out, "model: {} (n = {}, m = {}, mu = {})", m.name, m.n, float(m.m), float(m.mu));
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        if let Some(body) = &self.text_body {
            out.push_str(body);
        } else {
            let width = self.payload.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            for (key, value) in &self.payload {
                write_text_value(&mut out, key, value, width);
            }
        }
        if !self.checks.is_empty() {
            let sw = self.checks.iter().map(|c| c.suite.len()).max().unwrap_or(0).max(5);
            let nw = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
            let _ = writeln!(out, "{:sw$}  {:nw$}  status  {:>23}  {:>23}", "suite", "check", "residual", "tolerance");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "{:sw$}  {:nw$}  {:6}  {:>23}  {:>23}",
                    c.suite,
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" },
                    float(c.residual),
                    float(c.tolerance)
                );
            }
            let failed = self.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        }
        let _ = writeln!(out, "exit_status: {}", self.exit_status());
        out
    }

    pub fn render_json(&self) -> String {
        let mut fields: Vec<(String, String)> = vec![("command".into(), json_string(&self.command))];
        if let Some(m) = &self.model {
            fields.push((
                "model".into(),
                json_object(&[
                    ("name".into(), json_string(&m.name)),
                    ("n".into(), m.n.to_string()),
                    ("m".into(), json_float(m.m)),
                    ("mu".into(), json_float(m.mu)),
                ]),
            ));
        }
        if let Some(seed) = self.seed {
            fields.push(("seed".into(), seed.to_string()));
        }
        let payload: Vec<(String, String)> = self.payload.iter().map(|(k, v)| (k.clone(), json_value(v))).collect();
        fields.push(("payload".into(), json_object(&payload)));
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                json_object(&[
                    ("suite".into(), json_string(&c.suite)),
                    ("name".into(), json_string(&c.name)),
                    ("passed".into(), c.passed.to_string()),
                    ("residual".into(), json_float(c.residual)),
                    ("tolerance".into(), json_float(c.tolerance)),
                ])
            })
            .collect();
        fields.push(("checks".into(), format!("[{}]", checks.join(","))));
        fields.push(("exit_status".into(), self.exit_status().to_string()));
        let mut out = json_object(&fields);
        out.push('\n');
        out
    }
}

fn write_text_value(out: &mut String, key: &str, value: &Value, width: usize) {
    match value {
        Value::Matrix(rows) => {
            let _ = writeln!(out, "{key}:");
            for row in rows {
                let cells: Vec<String> = row.iter().map(|x| format!("{:>24}", float(*x))).collect();
                let _ = writeln!(out, "  {}", cells.join(" "));
            }
        }
        Value::Vector(v) => {
            let cells: Vec<String> = v.iter().map(|x| float(*x)).collect();
            let _ = writeln!(out, "{key:width$}  [{}]", cells.join(", "));
        }
        Value::Float(x) => {
            let _ = writeln!(out, "{key:width$}  {:>24}", float(*x));
        }
        Value::Int(i) => {
            let _ = writeln!(out, "{key:width$}  {i:>24}");
        }
        Value::Bool(b) => {
            let _ = writeln!(out, "{key:width$}  {b:>24}");
        }
        Value::Text(s) => {
            let _ = writeln!(out, "{key:width$}  {s}");
        }
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// JSON has no non-finite numbers; those become `null`.
pub fn json_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn json_object(fields: &[(String, String)]) -> String {
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("{}:{v}", json_string(k))).collect();
    format!("{{{}}}", body.join(","))
}

fn json_value(v: &Value) -> String {
    let list = |xs: &[f64]| format!("[{}]", xs.iter().map(|x| json_float(*x)).collect::<Vec<_>>().join(","));
    match v {
        Value::Float(x) => json_float(*x),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => json_string(s),
        Value::Vector(xs) => list(xs),
        Value::Matrix(rows) => format!("[{}]", rows.iter().map(|r| list(r)).collect::<Vec<_>>().join(",")),
    }
}
