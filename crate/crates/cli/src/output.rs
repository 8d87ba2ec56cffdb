use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A cell of a tabular result.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Rows under a fixed header, plus command metadata for the JSON envelope.
pub struct Table {
    pub command: &'static str,
    pub params: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Option<Value>,
}

impl Table {
    pub fn new(command: &'static str, params: Value, header: Vec<&'static str>) -> Self {
        Self { command, params, header, rows: Vec::new(), summary: None }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))?;
        }
        out.flush()
    }

    fn json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = envelope(self.command, &self.params);
        doc["rows"] = Value::Array(rows);
        if let Some(summary) = &self.summary {
            doc["summary"] = summary.clone();
        }
        doc
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        match format {
            Format::Csv => with_sink(out, |w| self.write_csv(w)),
            Format::Json => emit_json(&self.json(), out),
        }
    }
}

pub fn envelope(command: &str, params: &Value) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "command": command, "params": params })
}

/// JSON document `{schema_version, command, params, result}`.
pub fn emit_object<T: Serialize>(command: &str, params: &Value, result: &T, out: Option<&Path>) -> io::Result<()> {
    let mut doc = envelope(command, params);
    doc["result"] = serde_json::to_value(result).map_err(io::Error::other)?;
    emit_json(&doc, out)
}

fn emit_json(doc: &Value, out: Option<&Path>) -> io::Result<()> {
    with_sink(out, |mut w| {
        serde_json::to_writer_pretty(&mut w, doc).map_err(io::Error::other)?;
        w.write_all(b"\n")?;
        w.flush()
    })
}

fn with_sink(out: Option<&Path>, f: impl FnOnce(Box<dyn Write>) -> io::Result<()>) -> io::Result<()> {
    match out {
        Some(path) => f(Box::new(BufWriter::new(File::create(path)?))),
        None => f(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_carry_seventeen_significant_digits() {
        assert_eq!(Cell::Real(0.1).csv(), "1.0000000000000001e-1");
        assert_eq!(Cell::Real(-2.5).csv(), "-2.5000000000000000e0");
        assert_eq!(Cell::Int(7).csv(), "7");
    }

    #[test]
    fn csv_has_header_and_lf_endings() {
        let mut t = Table::new("t", json!({}), vec!["n", "x"]);
        t.push(vec![1usize.into(), 0.5.into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,x\n1,5.0000000000000000e-1\n");
    }

    #[test]
    fn json_rows_are_keyed_by_header() {
        let mut t = Table::new("t", json!({"k": 2}), vec!["n", "x"]);
        t.push(vec![3usize.into(), 1.5.into()]);
        let doc = t.json();
        assert_eq!(doc["schema_version"], SCHEMA_VERSION);
        assert_eq!(doc["rows"][0]["n"], 3);
        assert_eq!(doc["rows"][0]["x"], 1.5);
        assert_eq!(doc["params"]["k"], 2);
    }
}
