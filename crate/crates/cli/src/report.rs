//! Output documents and their json / csv / table renderings.
//!
//! json: `{"command", "inputs", "results", "rows"?}` with numbers in their
//! shortest round-trip form. csv: the rows (or, for single-record commands,
//! the results as one row) with 17 significant digits. table: rounded to 6.

use serde_json::{Map, Number, Value as Json};

use crate::args::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as u64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl Value {
    fn json(&self) -> Json {
        match self {
            Value::Num(x) => Number::from_f64(*x).map_or(Json::Null, Json::Number),
            Value::Int(n) => Json::from(*n),
            Value::Text(s) => Json::from(s.as_str()),
            Value::Bool(b) => Json::from(*b),
        }
    }

    fn csv(&self) -> String {
        match self {
            Value::Num(x) => format!("{x:.16e}"),
            Value::Int(n) => n.to_string(),
            Value::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn table(&self) -> String {
        match self {
            Value::Num(x) if *x == 0.0 || (1e-4..1e12).contains(&x.abs()) => format!("{x:.6}"),
            Value::Num(x) if x.is_finite() => format!("{x:.6e}"),
            Value::Num(x) => x.to_string(),
            other => other.csv(),
        }
    }
}

pub type Fields = Vec<(&'static str, Value)>;

#[derive(Debug, Clone, Default)]
pub struct Document {
    pub command: String,
    pub inputs: Fields,
    pub results: Fields,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Document {
    pub fn new(command: impl Into<String>, inputs: Fields) -> Self {
        Self {
            command: command.into(),
            inputs,
            ..Self::default()
        }
    }

    pub fn result(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.results.push((key, value.into()));
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.json(),
            OutputFormat::Csv => self.csv(),
            OutputFormat::Table => self.table(),
        }
    }

    fn json(&self) -> String {
        let object = |fields: &Fields| {
            Json::Object(fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect::<Map<_, _>>())
        };
        let mut doc = Map::new();
        doc.insert("command".into(), Json::from(self.command.as_str()));
        doc.insert("inputs".into(), object(&self.inputs));
        doc.insert("results".into(), object(&self.results));
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|row| {
                    Json::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect(),
                    )
                })
                .collect();
            doc.insert("rows".into(), Json::Array(rows));
        }
        let mut out = serde_json::to_string_pretty(&Json::Object(doc)).expect("JSON values are finite or null");
        out.push('\n');
        out
    }

    fn csv(&self) -> String {
        let line = |cells: Vec<String>| cells.join(",") + "\n";
        if self.columns.is_empty() {
            let header = line(self.results.iter().map(|(k, _)| k.to_string()).collect());
            return header + &line(self.results.iter().map(|(_, v)| v.csv()).collect());
        }
        let mut out = line(self.columns.iter().map(|c| c.to_string()).collect());
        for row in &self.rows {
            out += &line(row.iter().map(Value::csv).collect());
        }
        out
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let width = self.results.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.results {
            out += &format!("{k:<width$}  {}\n", v.table());
        }
        if !self.columns.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Value::table).collect()).collect();
            let widths: Vec<usize> = self
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let text: Vec<bool> = (0..self.columns.len())
                .map(|i| matches!(self.rows.first().map(|r| &r[i]), Some(Value::Text(_))))
                .collect();
            let line = |items: Vec<&str>| {
                items
                    .iter()
                    .zip(widths.iter().zip(&text))
                    .map(|(s, (w, left))| if *left { format!("{s:<w$}") } else { format!("{s:>w$}") })
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
                    + "\n"
            };
            out += &line(self.columns.clone());
            for r in &cells {
                out += &line(r.iter().map(String::as_str).collect());
            }
        }
        out
    }
}
