//! Tabular output as CSV or JSON.
//!
//! CSV splits each complex column `x` into `x_re`, `x_im`. JSON writes
//! `{"meta": {..}, "rows": [{..}, ..]}` with complex values as `[re, im]`.
//! Floats are printed with 17 significant digits; non-finite values become
//! empty CSV fields and JSON `null`.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Complex,
    Int,
    Bool,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Complex(Complex64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Missing value of the column's kind.
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<(String, Kind)>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

fn json_float(x: f64) -> Value {
    match format_float(x) {
        Some(s) => Value::Number(s.parse::<Number>().expect("formatted float is a JSON number")),
        None => Value::Null,
    }
}

impl Table {
    pub fn new(columns: &[(&str, Kind)]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn meta_float(&mut self, key: &str, value: f64) -> &mut Self {
        self.meta.push((key.to_string(), json_float(value)));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn csv_header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|(name, kind)| match kind {
                Kind::Complex => vec![format!("{name}_re"), format!("{name}_im")],
                _ => vec![name.clone()],
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.csv_header())?;
        for row in &self.rows {
            let mut rec = Vec::with_capacity(row.len() + 4);
            for (cell, (_, kind)) in row.iter().zip(&self.columns) {
                match cell {
                    Cell::Float(x) => rec.push(format_float(*x).unwrap_or_default()),
                    Cell::Complex(z) => {
                        rec.push(format_float(z.re).unwrap_or_default());
                        rec.push(format_float(z.im).unwrap_or_default());
                    }
                    Cell::Int(i) => rec.push(i.to_string()),
                    Cell::Bool(b) => rec.push(b.to_string()),
                    Cell::Text(s) => rec.push(s.clone()),
                    Cell::Empty => {
                        rec.push(String::new());
                        if *kind == Kind::Complex {
                            rec.push(String::new());
                        }
                    }
                }
            }
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self.meta.iter().cloned().collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = row
                    .iter()
                    .zip(&self.columns)
                    .map(|(cell, (name, _))| {
                        let v = match cell {
                            Cell::Float(x) => json_float(*x),
                            Cell::Complex(z) => Value::Array(vec![json_float(z.re), json_float(z.im)]),
                            Cell::Int(i) => Value::from(*i),
                            Cell::Bool(b) => Value::Bool(*b),
                            Cell::Text(s) => Value::String(s.clone()),
                            Cell::Empty => Value::Null,
                        };
                        (name.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

/// Directory used when no explicit output path is given.
pub const OUT_DIR_VAR: &str = "WEYL_OUT_DIR";

/// Explicit path, else `$WEYL_OUT_DIR/<stem>.<ext>`, else stdout (`None`).
pub fn resolve_output(explicit: Option<&Path>, stem: &str, format: Format) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_VAR)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{stem}.{}", format.extension())))
}

pub fn emit(table: &Table, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let file = File::create(p).with_context(|| format!("writing {}", p.display()))?;
            let mut w = io::BufWriter::new(file);
            table.write(format, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => table.write(format, io::stdout().lock()),
    }
}
