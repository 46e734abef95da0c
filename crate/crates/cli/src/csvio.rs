//! Schema-checked CSV emission. Every table is validated against its column
//! contract (header width and per-row width) before a byte is written;
//! floats go through the shortest-roundtrip formatter so identical runs
//! produce identical bytes.

use crate::{HarnessError, HarnessResult};

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String> + Clone>(header: &[S]) -> Self {
        Self { header: header.iter().cloned().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// RFC-4180 style bytes: header row, '.' decimals, UTF-8, \n terminators.
    pub fn to_bytes(&self) -> HarnessResult<Vec<u8>> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(HarnessError::Validation(format!(
                    "row {i} has {} fields, schema {:?} has {}",
                    row.len(),
                    self.header,
                    self.header.len()
                )));
            }
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| HarnessError::Other(anyhow::anyhow!("csv flush: {e}")))
    }
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Other(anyhow::anyhow!("csv write: {e}"))
}

/// Shortest-roundtrip decimal form; empty string for None.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn opt_count(v: Option<usize>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}
