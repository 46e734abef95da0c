//! Observation file schema: CSV with columns `s_index,g1,g2`. A column may
//! be entirely empty (single-receiver data), in which case only the other
//! receiver's estimate is available and the difference estimate is not.

use crate::{HarnessError, HarnessResult};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct ObservationFile {
    pub g1: Option<Vec<u64>>,
    pub g2: Option<Vec<u64>>,
}

impl ObservationFile {
    pub fn len(&self) -> usize {
        self.g1.as_ref().map(|v| v.len()).or_else(|| self.g2.as_ref().map(|v| v.len())).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn read_observations(path: &Path) -> HarnessResult<ObservationFile> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::Validation(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?
        .clone();
    let expected = ["s_index", "g1", "g2"];
    if headers.len() != 3 || !headers.iter().zip(expected).all(|(h, e)| h == e) {
        return Err(HarnessError::Validation(format!(
            "{}: header must be s_index,g1,g2 (got {:?})",
            path.display(),
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut g1: Vec<Option<u64>> = Vec::new();
    let mut g2: Vec<Option<u64>> = Vec::new();
    let mut bad_rows: Vec<String> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                bad_rows.push(format!("line {line}: {e}"));
                continue;
            }
        };
        if record.len() != 3 {
            bad_rows.push(format!("line {line}: expected 3 fields, got {}", record.len()));
            continue;
        }
        match record[0].parse::<u64>() {
            Ok(idx) if idx as usize == i + 1 => {}
            Ok(idx) => bad_rows.push(format!("line {line}: s_index {idx} out of order (expected {})", i + 1)),
            Err(_) => bad_rows.push(format!("line {line}: s_index '{}' is not an integer", &record[0])),
        }
        for (field, out, name) in [(&record[1], &mut g1, "g1"), (&record[2], &mut g2, "g2")] {
            if field.is_empty() {
                out.push(None);
            } else {
                match field.parse::<u64>() {
                    Ok(v) => out.push(Some(v)),
                    Err(_) => {
                        bad_rows.push(format!("line {line}: {name} '{field}' is not a non-negative integer"));
                        out.push(None);
                    }
                }
            }
        }
    }
    if !bad_rows.is_empty() {
        return Err(HarnessError::Validation(format!(
            "{}: {} invalid rows:\n  {}",
            path.display(),
            bad_rows.len(),
            bad_rows.join("\n  ")
        )));
    }
    if g1.is_empty() {
        return Err(HarnessError::Validation(format!("{}: no observation rows", path.display())));
    }
    let collapse = |col: Vec<Option<u64>>, name: &str| -> HarnessResult<Option<Vec<u64>>> {
        let present = col.iter().filter(|v| v.is_some()).count();
        if present == 0 {
            Ok(None)
        } else if present == col.len() {
            Ok(Some(col.into_iter().map(|v| v.unwrap()).collect()))
        } else {
            Err(HarnessError::Validation(format!(
                "column {name} is partially filled ({present} of {}); a receiver is all-or-nothing",
                col.len()
            )))
        }
    };
    let g1 = collapse(g1, "g1")?;
    let g2 = collapse(g2, "g2")?;
    if g1.is_none() && g2.is_none() {
        return Err(HarnessError::Validation("both receiver columns are empty".into()));
    }
    Ok(ObservationFile { g1, g2 })
}

pub fn write_observations(path: &Path, pairs: &[[u64; 2]]) -> HarnessResult<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Other(anyhow::anyhow!("cannot create {}: {e}", path.display())))?;
    w.write_record(["s_index", "g1", "g2"])
        .map_err(|e| HarnessError::Other(anyhow::anyhow!("{e}")))?;
    for (i, pair) in pairs.iter().enumerate() {
        w.write_record([(i + 1).to_string(), pair[0].to_string(), pair[1].to_string()])
            .map_err(|e| HarnessError::Other(anyhow::anyhow!("{e}")))?;
    }
    w.flush().map_err(|e| HarnessError::Other(anyhow::anyhow!("{e}")))?;
    Ok(())
}
