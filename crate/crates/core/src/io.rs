//! File formats: CSV matrices, deterministic JSON, two-column text and
//! instance documents.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::generators::{fuel_instance, FuelInstance, LtiSystem};
use crate::linalg::Matrix;

/// Parses a headerless CSV matrix; ragged rows are rejected.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, s)| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}, column {}: {s:?}", i + 1, j + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix file".into()));
    }
    Matrix::from_rows(&rows)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix_csv(&fs::read_to_string(path)?)
}

/// A vector stored as a single row or a single column.
pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = read_matrix_csv(path)?;
    if m.rows() == 1 || m.cols() == 1 {
        Ok(m.as_slice().to_vec())
    } else {
        Err(Error::Dimension(format!(
            "expected a vector, got a {}x{} matrix",
            m.rows(),
            m.cols()
        )))
    }
}

/// Fixed 17-significant-digit rendering.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

/// Column vector CSV.
pub fn write_vector_csv(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let text: String = v.iter().map(|&x| fmt_f64(x) + "\n").collect();
    fs::write(path, text)?;
    Ok(())
}

/// Lines `index value` for plotting.
pub fn two_column_text(pairs: impl IntoIterator<Item = (usize, f64)>) -> String {
    pairs
        .into_iter()
        .map(|(k, v)| format!("{k} {}\n", fmt_f64(v)))
        .collect()
}

/// `(k, v_k)` with 1-based `k`.
pub fn write_two_column(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    fs::write(path, two_column_text(values.iter().copied().enumerate().map(|(i, v)| (i + 1, v))))?;
    Ok(())
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap()));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with every float printed to 17 significant digits.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(to_json_string(value)?.as_bytes())?;
    Ok(())
}

/// On-disk description of a system or fuel instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_true: Option<BTreeMap<usize, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_of_column: Option<Vec<(usize, usize)>>,
}

impl InstanceFile {
    pub fn from_fuel(inst: &FuelInstance) -> Self {
        Self {
            a: inst.system.a.to_rows(),
            b: inst.system.b.clone(),
            c: inst.system.c.clone(),
            n: inst.horizon,
            xi: Some(inst.xi.clone()),
            y: Some(inst.y.clone()),
            u_true: Some(inst.u_true.clone()),
            time_of_column: Some(inst.time_of_column.clone()),
        }
    }

    pub fn system(&self) -> Result<LtiSystem> {
        LtiSystem::new(Matrix::from_rows(&self.a)?, self.b.clone(), self.c.clone())
    }

    /// Rebuilds the fuel instance from `u_true` (empty when absent).
    pub fn to_fuel(&self) -> Result<FuelInstance> {
        fuel_instance(&self.system()?, self.n, &self.u_true.clone().unwrap_or_default())
    }
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}
