//! Column-labeled result tables and their CSV serialization.
//!
//! Every experiment in this crate reports through a [`Table`]: a header row
//! plus string cells, written as UTF-8 CSV. Numeric cells are formatted with
//! [`fmt_sig9`] (9 significant digits) so equal results serialize to equal
//! bytes — the reproducibility checks compare whole output files.

use crate::error::{Error, Result};
use std::fs;
use std::path::Path;

/// Formats a float with 9 significant digits, trimming trailing zeros, in
/// the style of C's `%.9g` (fixed notation near unity, scientific for very
/// large or very small magnitudes).
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Round to 9 significant digits in scientific form, then choose notation
    // from the rounded exponent the way %g does.
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponential format");
    let e: i32 = exp.parse().expect("exponent parses");
    if e < -4 || e >= 9 {
        let m = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{e}")
    } else {
        let decimals = (8 - e).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    }
}

/// A header plus rows of cells, all pre-rendered to strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; its cell count must match the header.
    pub fn push_row(&mut self, cells: Vec<String>) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::Size {
                what: "table row cells",
                expected: self.columns.len(),
                got: cells.len(),
            });
        }
        self.rows.push(cells);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Renders the table as CSV text (header first; an empty table is just
    /// the header line). Cells containing delimiters are quoted.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        push_csv_line(&mut out, &self.columns);
        for row in &self.rows {
            push_csv_line(&mut out, row);
        }
        out
    }

    /// Writes the CSV rendering to `path`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn push_csv_line(out: &mut String, cells: &[String]) {
    for (i, cell) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
            out.push('"');
            out.push_str(&cell.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(cell);
        }
    }
    out.push('\n');
}
