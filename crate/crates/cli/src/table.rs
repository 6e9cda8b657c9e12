//! CSV/JSON emission with a reproducibility header.

use serde_json::{json, Map, Number, Value};

use crate::config::{Command, Format};

pub const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Exact integer too large for `i64`, kept as decimal digits.
    Big(String),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra structured output carried in the JSON body and as a CSV header line.
    pub diagnostics: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded = round12(x);
    if rounded != 0.0 && !(1e-5..1e15).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

fn json_float(x: f64) -> Value {
    Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Float(v) => json_float(*v),
        Cell::Big(s) => s
            .parse::<u64>()
            .map_or_else(|_| Value::String(s.clone()), |v| json!(v)),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

fn cell_csv(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => fmt12(*v),
        Cell::Big(s) => s.clone(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            n.as_f64().map_or(Value::Number(n), json_float)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn meta(config: &Command) -> Value {
    json!({
        "tool": "haa",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed(),
        "config": config,
    })
}

pub fn render(table: &Table, config: &Command, format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(k, c)| (k.to_string(), cell_json(c)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut body = json!({ "meta": meta(config), "rows": rows });
            if let Some(d) = &table.diagnostics {
                body["diagnostics"] = round_floats(d.clone());
            }
            let mut s = serde_json::to_string_pretty(&body).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# haa {}\n", env!("CARGO_PKG_VERSION")));
            match config.seed() {
                Some(seed) => s.push_str(&format!("# seed: {seed}\n")),
                None => s.push_str("# seed: none\n"),
            }
            s.push_str(CONFIG_PREFIX);
            s.push_str(&serde_json::to_string(config).expect("config serializes"));
            s.push('\n');
            if let Some(d) = &table.diagnostics {
                s.push_str("# diagnostics: ");
                s.push_str(
                    &serde_json::to_string(&round_floats(d.clone()))
                        .expect("JSON values serialize"),
                );
                s.push('\n');
            }
            s.push_str(&table.columns.join(","));
            s.push('\n');
            for r in &table.rows {
                let line: Vec<String> = r.iter().map(cell_csv).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
    }
}

/// Recovers the recorded configuration from a CSV header or a JSON body.
pub fn config_from_output(text: &str) -> Result<Command, String> {
    let trimmed = text.trim_start();
    let config = if trimmed.starts_with('{') {
        let v: Value =
            serde_json::from_str(trimmed).map_err(|e| format!("not a JSON output file: {e}"))?;
        v.get("meta")
            .and_then(|m| m.get("config"))
            .cloned()
            .ok_or("JSON output has no meta.config")?
    } else {
        let line = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
            .ok_or("no '# config:' line in the CSV header")?;
        serde_json::from_str(line).map_err(|e| format!("bad config line: {e}"))?
    };
    serde_json::from_value(config).map_err(|e| format!("unrecognized configuration: {e}"))
}
