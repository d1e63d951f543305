//! CSV and JSON artifacts.
//!
//! Complex fields are written as `x,y,re,im` rows (rows of constant `y`,
//! `x` increasing) with a JSON sidecar holding the grid and the field's
//! meaning. Coefficient pairs use `x,y,re_mu,im_mu,re_nu,im_nu` and scalar
//! weights `x,y,q`. Numbers carry 13 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, Meaning};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub center_re: f64,
    pub center_im: f64,
    pub halfwidth: f64,
    pub resolution: usize,
    pub meaning: Meaning,
}

impl FieldSidecar {
    pub fn of(field: &ComplexField) -> Self {
        let s = field.spec();
        Self {
            center_re: s.center().re,
            center_im: s.center().im,
            halfwidth: s.halfwidth(),
            resolution: s.resolution(),
            meaning: field.meaning(),
        }
    }

    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(Complex64::new(self.center_re, self.center_im), self.halfwidth, self.resolution)
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Nodes in output order: rows of constant `y`, `x` increasing.
fn row_major(spec: &GridSpec) -> impl Iterator<Item = usize> + '_ {
    let n = spec.resolution();
    (0..n).flat_map(move |j| (0..n).map(move |i| spec.index(i, j)))
}

pub fn field_csv(field: &ComplexField) -> String {
    let spec = field.spec();
    let mut out = String::from("x,y,re,im\n");
    for idx in row_major(spec) {
        let z = spec.node_at(idx);
        let v = field.values()[idx];
        let _ = writeln!(out, "{},{},{},{}", num(z.re), num(z.im), num(v.re), num(v.im));
    }
    out
}

/// Writes `path` and its sidecar.
pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    fs::write(path, field_csv(field))?;
    write_json(&sidecar_path(path), &FieldSidecar::of(field))
}

pub fn coefficient_csv(coeff: &CoefficientField) -> String {
    let spec = coeff.spec();
    let mut out = String::from("x,y,re_mu,im_mu,re_nu,im_nu\n");
    for idx in row_major(spec) {
        let z = spec.node_at(idx);
        let (m, n) = (coeff.mu().values()[idx], coeff.nu().values()[idx]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(z.re),
            num(z.im),
            num(m.re),
            num(m.im),
            num(n.re),
            num(n.im)
        );
    }
    out
}

/// Parses a headed CSV whose rows start with node coordinates and places
/// the remaining columns on `spec`. Every node must appear exactly once.
fn parse_grid_csv(text: &str, spec: &GridSpec, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    if cols != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", header.join(",")),
        });
    }
    let width = header.len() - 2;
    let mut values: Vec<Option<Vec<f64>>> = vec![None; spec.len()];
    let tol = 1e-6 * spec.spacing();
    let mut last = 1;
    for (k, line) in lines {
        let line_no = k + 1;
        last = line_no;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let row = parsed.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if row.len() != header.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} columns, found {}", header.len(), row.len()),
            });
        }
        let z = Complex64::new(row[0], row[1]);
        let (i, j) = spec.nearest_node(z);
        let idx = spec.index(i, j);
        if (spec.node(i, j) - z).norm() > tol {
            return Err(Error::Parse {
                line: line_no,
                message: format!("({}, {}) is not a grid node", row[0], row[1]),
            });
        }
        if values[idx].is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate node ({}, {})", row[0], row[1]),
            });
        }
        values[idx] = Some(row[2..2 + width].to_vec());
    }
    let missing = values.iter().filter(|v| v.is_none()).count();
    if missing > 0 {
        return Err(Error::Parse {
            line: last,
            message: format!("{missing} grid nodes are missing"),
        });
    }
    Ok(values.into_iter().map(|v| v.expect("checked")).collect())
}

pub fn parse_coefficients(text: &str, spec: &GridSpec) -> Result<CoefficientField> {
    let rows = parse_grid_csv(text, spec, &["x", "y", "re_mu", "im_mu", "re_nu", "im_nu"])?;
    let mu = rows.iter().map(|r| Complex64::new(r[0], r[1])).collect();
    let nu = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
    CoefficientField::new(
        ComplexField::new(*spec, mu, Meaning::Coefficient)?,
        ComplexField::new(*spec, nu, Meaning::Coefficient)?,
    )
}

pub fn read_coefficients(path: &Path, spec: &GridSpec) -> Result<CoefficientField> {
    parse_coefficients(&fs::read_to_string(path)?, spec)
}

/// Scalar weight file `x,y,q`; `inf` is accepted.
pub fn parse_weight(text: &str, spec: &GridSpec) -> Result<ComplexField> {
    let rows = parse_grid_csv(text, spec, &["x", "y", "q"])?;
    ComplexField::from_real(*spec, rows.iter().map(|r| r[0]).collect())
}

pub fn read_weight(path: &Path, spec: &GridSpec) -> Result<ComplexField> {
    parse_weight(&fs::read_to_string(path)?, spec)
}

/// Reads a field written by [`write_field`].
pub fn read_field(path: &Path) -> Result<ComplexField> {
    let sidecar: FieldSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let spec = sidecar.spec()?;
    let rows = parse_grid_csv(&fs::read_to_string(path)?, &spec, &["x", "y", "re", "im"])?;
    ComplexField::new(spec, rows.iter().map(|r| Complex64::new(r[0], r[1])).collect(), sidecar.meaning)
}

/// Rounds every float to 12 significant digits so reports are stable
/// across platforms and reruns.
fn canonical(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Number(n) if n.is_f64() => {
            let v = n.as_f64().expect("f64");
            let r: f64 = format!("{v:.11e}").parse().expect("formatted float");
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = canonical(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}
