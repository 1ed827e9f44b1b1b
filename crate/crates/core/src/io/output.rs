//! Deterministic table output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::modal::ModalSystem;
use crate::thermo::{ConvergenceReport, FieldSolution};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn to_json(self) -> Value {
        match self {
            Cell::Float(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Scientific notation with 17 significant digits; parses back exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Float(x) => out.push_str(&format_float(*x)),
                    Cell::Int(n) => write!(out, "{n}").unwrap(),
                    Cell::Bool(b) => write!(out, "{b}").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| c.to_json()).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

/// Columns `t, x, V1, V2, V3, u, theta`, time-major.
pub fn field_table(field: &FieldSolution) -> Table {
    let mut rows = Vec::with_capacity(field.nt() * field.nx());
    for (it, &t) in field.t_grid.iter().enumerate() {
        for (ix, &x) in field.x_grid.iter().enumerate() {
            let v = field.v_at(it, ix);
            rows.push(vec![
                Cell::Float(t),
                Cell::Float(x),
                Cell::Float(v[0]),
                Cell::Float(v[1]),
                Cell::Float(v[2]),
                Cell::Float(field.u_at(it, ix)),
                Cell::Float(field.theta_at(it, ix)),
            ]);
        }
    }
    Table {
        columns: vec!["t", "x", "V1", "V2", "V3", "u", "theta"],
        rows,
    }
}

/// One row per mode: wavenumber, eigenvalues, diagonalizability, `κ(S)`.
pub fn modes_table(systems: &[ModalSystem]) -> Table {
    let rows = systems
        .iter()
        .map(|s| {
            let mut row = vec![Cell::Int(s.n as i64), Cell::Float(s.nu)];
            for mu in &s.eigenvalues {
                row.push(Cell::Float(mu.re));
                row.push(Cell::Float(mu.im));
            }
            row.push(Cell::Bool(s.diagonalizable));
            row.push(Cell::Float(s.condition));
            row
        })
        .collect();
    Table {
        columns: vec![
            "n", "nu", "mu0_re", "mu0_im", "mu1_re", "mu1_im", "mu2_re", "mu2_im",
            "diagonalizable", "cond_s",
        ],
        rows,
    }
}

pub fn convergence_table(report: &ConvergenceReport) -> Table {
    Table {
        columns: vec!["tau", "sup_error"],
        rows: report
            .entries
            .iter()
            .map(|e| vec![Cell::Float(e.tau), Cell::Float(e.sup_error)])
            .collect(),
    }
}

pub fn convergence_summary(report: &ConvergenceReport) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "tau": e.tau,
                "sup_error": e.sup_error,
                "sup_error_inf": e.sup_error_inf,
                "bound": e.bound,
                "bound_holds": e.bound_holds,
                "per_mode": e.per_mode,
            })
        })
        .collect();
    json!({
        "slope": report.slope,
        "slope_inf": report.slope_inf,
        "entries": entries,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `contents` to `dir/name` and returns its SHA-256.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String> {
    fs::write(dir.join(name), contents)?;
    Ok(sha256_hex(contents.as_bytes()))
}
