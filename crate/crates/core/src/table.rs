//! CSV emission with a fixed column schema.

use std::fmt;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    /// Absent value (e.g. a sweep point without a crossing); written empty.
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to that rounded value.
pub fn format_float(x: f64) -> String {
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("exponent formatting parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let exp = rounded.abs().log10().floor();
    if (-5.0..15.0).contains(&exp) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => f.write_str(&format_float(*x)),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        emit_table(&self.columns, &self.rows)
    }
}

/// Header plus rows, each row newline-terminated. Rejects rows of the wrong
/// width and non-finite floats, naming the (0-based) row.
pub fn emit_table(columns: &[&str], rows: &[Vec<Cell>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Table(e.to_string());
    w.write_record(columns).map_err(csv_err)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != columns.len() {
            return Err(Error::Table(format!(
                "row {i} has {} fields, schema has {}",
                row.len(),
                columns.len()
            )));
        }
        if let Some((j, _)) = row
            .iter()
            .enumerate()
            .find(|(_, c)| matches!(c, Cell::Float(x) if !x.is_finite()))
        {
            return Err(Error::Table(format!(
                "row {i}, column `{}`: non-finite value",
                columns[j]
            )));
        }
        w.write_record(row.iter().map(Cell::to_string))
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Table(e.to_string()))
}
