use std::str::FromStr;

use finsler_core::classify::Extremum;
use serde_json::{Map, Number, Value};

pub const SCHEMA: u64 = 1;

/// A finite number with 17 significant digits, or `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        let text = format!("{x:.16e}");
        Value::Number(Number::from_str(&text).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn nums(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num).collect())
}

pub fn extremum(e: &Extremum) -> Value {
    obj([("value", num(e.value)), ("r", num(e.r)), ("s", num(e.s))])
}

pub fn obj<const N: usize>(entries: [(&str, Value); N]) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// One expected property of a reproduced example.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|value − expected| ≤ tolerance`.
    pub fn close(name: &str, value: f64, expected: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }

    /// `value < bound`.
    pub fn below(name: &str, value: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            value,
            expected: 0.0,
            tolerance: bound,
            pass: value < bound,
        }
    }

    /// A condition with no numeric value; recorded as 1 when it holds.
    pub fn holds(name: &str, ok: bool) -> Check {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            pass: ok,
        }
    }

    fn to_json(&self) -> Value {
        obj([
            ("name", Value::String(self.name.clone())),
            ("value", num(self.value)),
            ("expected", num(self.expected)),
            ("tolerance", num(self.tolerance)),
            ("pass", Value::Bool(self.pass)),
        ])
    }
}

/// The machine-readable result of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Map<String, Value>,
    pub residual_maxima: Map<String, Value>,
    pub verdict: Option<String>,
    pub checks: Vec<Check>,
    pub runtime_ms: Option<f64>,
    /// Lines for the human-readable summary.
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            command: command.into(),
            config,
            results: Map::new(),
            residual_maxima: Map::new(),
            verdict: None,
            checks: Vec::new(),
            runtime_ms: None,
            summary: Vec::new(),
        }
    }

    pub fn result(&mut self, key: &str, v: Value) {
        self.results.insert(key.into(), v);
    }

    pub fn maximum(&mut self, key: &str, v: Value) {
        self.residual_maxima.insert(key.into(), v);
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut top = Map::new();
        top.insert("schema".into(), Value::from(SCHEMA));
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("config".into(), self.config.clone());
        let mut results = self.results.clone();
        if !self.checks.is_empty() {
            results.insert(
                "checks".into(),
                Value::Array(self.checks.iter().map(Check::to_json).collect()),
            );
            results.insert("all_checks_pass".into(), Value::Bool(self.all_checks_pass()));
        }
        top.insert("results".into(), Value::Object(results));
        top.insert(
            "residual_maxima".into(),
            Value::Object(self.residual_maxima.clone()),
        );
        if let Some(v) = &self.verdict {
            top.insert("verdict".into(), Value::String(v.clone()));
        }
        top.insert(
            "runtime_ms".into(),
            self.runtime_ms.map(num).unwrap_or(Value::Null),
        );
        Value::Object(top)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        if let Some(v) = &self.verdict {
            out.push_str(&format!("  verdict: {v}\n"));
        }
        for line in &self.summary {
            out.push_str(&format!("  {line}\n"));
        }
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{mark}] {} = {:e}\n", c.name, c.value));
        }
        out
    }
}
