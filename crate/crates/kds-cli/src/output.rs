//! JSON envelope and CSV tables.
//!
//! Every float is written with 17 significant digits, so equal inputs give
//! byte-identical output.

use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const SCHEMA: &str = "kds-spectra/1";

/// Scientific notation with 17 significant digits and a signed exponent.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

/// Rewrites every non-integer number in `v` to 17 significant digits.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                let x: f64 = s.parse().expect("serde_json number parses as f64");
                let t = fmt_f64(x);
                Value::Number(serde_json::from_str::<Number>(&t).expect("formatted float is a JSON number"))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt_f64(*x),
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// RFC 4180: CRLF line ends, header first, quoting where needed.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// What a subcommand produced.
pub struct Report {
    pub result: Value,
    pub table: Table,
    /// Whether the requested checks passed; decides the exit code.
    pub ok: bool,
}

impl Report {
    pub fn new(result: Value, table: Table) -> Self {
        Report { result, table, ok: true }
    }

    pub fn with_ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

/// Record of the invocation, echoed in every JSON document.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub output: &'static str,
    pub seed: u64,
    pub params: Value,
}

fn envelope(cfg: &RunConfig, key: &str, body: Value) -> String {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m.insert("command".into(), Value::String(cfg.command.clone()));
    m.insert("config".into(), to_value(cfg));
    m.insert(key.into(), body);
    let mut s = serde_json::to_string_pretty(&normalize(Value::Object(m))).expect("values serialize");
    s.push('\n');
    s
}

pub fn render_json(cfg: &RunConfig, result: Value) -> String {
    envelope(cfg, "result", result)
}

pub fn render_error(cfg: &RunConfig, err: &kds_spectra::KdsError) -> String {
    let mut m = Map::new();
    m.insert("kind".into(), Value::String(err.kind().into()));
    m.insert("message".into(), Value::String(err.to_string()));
    if let kds_spectra::KdsError::Diverged { iteration, residual, trace } = err {
        m.insert("iteration".into(), Value::from(*iteration));
        m.insert("residual".into(), Value::from(*residual));
        m.insert("trace".into(), to_value(trace));
    }
    envelope(cfg, "error", Value::Object(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_seventeen_digits() {
        let v = normalize(serde_json::json!({"a": 0.1, "b": 3, "c": [1.0, -2.5e-300]}));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"a":1.0000000000000001e-1,"b":3,"c":[1.0000000000000000e+0,-2.5000000000000000e-300]}"#);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -1e-310, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_quotes_and_uses_crlf() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a,b".into(), 1.5.into()]);
        t.push(vec!["plain".into(), Cell::Empty]);
        assert_eq!(t.to_csv(), "name,value\r\n\"a,b\",1.5000000000000000e+0\r\nplain,\r\n");
    }
}
