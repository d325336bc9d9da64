//! Table artifacts. CSV uses `.` decimals, LF line endings, and 17
//! significant digits so every double round-trips exactly; JSON mirrors the
//! same rows as an array of objects. Every file is re-read and checked
//! against its schema before the run reports success.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColKind {
    Int,
    Float,
}

pub type Schema = &'static [(&'static str, ColKind)];

#[derive(Clone, Copy, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

/// 17 significant digits: the shortest fixed width that is lossless for
/// every f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON numbers lose denormal-range values, so anything with |log10| > 300
/// (and every non-finite value) is emitted as a decimal string instead.
pub fn json_float(v: f64) -> serde_json::Value {
    if !v.is_finite() {
        return serde_json::Value::String(format_float(v));
    }
    if v != 0.0 && !(1e-300..=1e300).contains(&v.abs()) {
        return serde_json::Value::String(format_float(v));
    }
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(format_float(v)))
}

/// Write `name.csv` or `name.json` under `dir`, then validate it against the
/// schema. Returns the file name written.
pub fn write_table(
    dir: &Path,
    name: &str,
    schema: Schema,
    rows: &[Vec<Cell>],
    format: OutputFormat,
) -> Result<String, CliError> {
    let (file_name, text) = match format {
        OutputFormat::Csv => (format!("{name}.csv"), render_csv(schema, rows)),
        OutputFormat::Json => (format!("{name}.json"), render_json(schema, rows)),
    };
    let path = dir.join(&file_name);
    fs::write(&path, text)
        .map_err(|e| CliError::Precondition(format!("cannot write {}: {e}", path.display())))?;
    validate_table(&path, schema, rows.len(), format)?;
    Ok(file_name)
}

fn render_csv(schema: Schema, rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    let header: Vec<&str> = schema.iter().map(|(n, _)| *n).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), schema.len());
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            match cell {
                Cell::Int(v) => out.push_str(&v.to_string()),
                Cell::Float(v) => out.push_str(&format_float(*v)),
            }
        }
        out.push('\n');
    }
    out
}

fn render_json(schema: Schema, rows: &[Vec<Cell>]) -> String {
    let array: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for ((name, _), cell) in schema.iter().zip(row) {
                let v = match cell {
                    Cell::Int(v) => serde_json::Value::from(*v),
                    Cell::Float(v) => json_float(*v),
                };
                obj.insert((*name).to_string(), v);
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Array(array))
        .expect("JSON rendering cannot fail");
    text.push('\n');
    text
}

/// Re-read and type-check an artifact. A mismatch means the writer is broken,
/// so this maps to the numerical-failure exit class.
pub fn validate_table(
    path: &Path,
    schema: Schema,
    expected_rows: usize,
    format: OutputFormat,
) -> Result<(), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Numerical(format!("cannot re-read {}: {e}", path.display())))?;
    let result = match format {
        OutputFormat::Csv => check_csv(&text, schema, expected_rows),
        OutputFormat::Json => check_json(&text, schema, expected_rows),
    };
    result.map_err(|msg| {
        CliError::Numerical(format!("schema check failed for {}: {msg}", path.display()))
    })
}

fn check_csv(text: &str, schema: Schema, expected_rows: usize) -> Result<(), String> {
    if text.contains('\r') {
        return Err("carriage return in CSV".into());
    }
    let mut lines = text.split('\n');
    let header: Vec<&str> = schema.iter().map(|(n, _)| *n).collect();
    if lines.next() != Some(header.join(",").as_str()) {
        return Err("bad header".into());
    }
    let mut rows = 0usize;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != schema.len() {
            return Err(format!("row {rows} has {} fields", cells.len()));
        }
        for (cell, (name, kind)) in cells.iter().zip(schema) {
            let ok = match kind {
                ColKind::Int => cell.parse::<i64>().is_ok(),
                ColKind::Float => cell.parse::<f64>().is_ok(),
            };
            if !ok {
                return Err(format!("row {rows} field {name}: cannot parse '{cell}'"));
            }
        }
        rows += 1;
    }
    if rows != expected_rows {
        return Err(format!("expected {expected_rows} rows, found {rows}"));
    }
    Ok(())
}

fn check_json(text: &str, schema: Schema, expected_rows: usize) -> Result<(), String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let array = value.as_array().ok_or("top level is not an array")?;
    if array.len() != expected_rows {
        return Err(format!(
            "expected {expected_rows} rows, found {}",
            array.len()
        ));
    }
    for (i, row) in array.iter().enumerate() {
        let obj = row.as_object().ok_or(format!("row {i} is not an object"))?;
        if obj.len() != schema.len() {
            return Err(format!("row {i} has {} fields", obj.len()));
        }
        for (name, kind) in schema {
            let v = obj.get(*name).ok_or(format!("row {i} is missing {name}"))?;
            let ok = match kind {
                ColKind::Int => v.is_i64() || v.is_u64(),
                // Strings carry non-finite and out-of-range doubles.
                ColKind::Float => v.is_number() || v.is_string(),
            };
            if !ok {
                return Err(format!("row {i} field {name} has the wrong type"));
            }
        }
    }
    Ok(())
}

pub fn out_path(dir: &Path, file_name: &str) -> PathBuf {
    dir.join(file_name)
}
