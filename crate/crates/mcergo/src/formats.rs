//! Kernel CSV, DTable JSON, and CSV writing helpers.

use std::fs;
use std::path::Path;

use mcergo_core::certify::{DTable, DTableEntry};
use mcergo_core::FiniteKernel;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

/// Serializes rows as CSV with a header and `\n` line endings.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Header of state coordinates (or `s0, s1, ...` without coordinates),
/// then one comma-separated row per state.
pub fn kernel_to_csv(k: &FiniteKernel) -> String {
    let header: Vec<String> = match k.coords() {
        Some(c) => c.iter().map(|x| fmt_f64(*x)).collect(),
        None => (0..k.n()).map(|i| format!("s{i}")).collect(),
    };
    let rows: Vec<Vec<String>> = (0..k.n())
        .map(|i| k.row(i).iter().map(|x| fmt_f64(*x)).collect())
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(&header, &rows)
}

pub fn kernel_from_csv(text: &str, origin: &Path) -> Result<FiniteKernel> {
    let bad = |message: String| HarnessError::Format {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let coords: Option<Vec<f64>> = header.iter().map(|h| h.trim().parse::<f64>().ok()).collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row: std::result::Result<Vec<f64>, _> = rec.iter().map(|x| x.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| bad(format!("row {i}: {e}")))?);
    }
    Ok(FiniteKernel::new(&rows, coords)?)
}

pub fn load_kernel(path: &Path) -> Result<FiniteKernel> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    kernel_from_csv(&text, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DTableFile {
    entries: Vec<DTableFileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DTableFileEntry {
    alpha: f64,
    upper: f64,
    lower: f64,
    #[serde(default)]
    verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

const DEFAULT_DTABLE: &str = include_str!("../data/dtable_default.json");

pub fn dtable_from_json(text: &str, origin: &Path) -> Result<DTable> {
    let file: DTableFile = serde_json::from_str(text).map_err(|e| HarnessError::Format {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    let entries = file
        .entries
        .into_iter()
        .map(|e| DTableEntry {
            alpha: e.alpha,
            upper: e.upper,
            lower: e.lower,
            verified: e.verified,
        })
        .collect();
    DTable::new(entries).map_err(|e| HarnessError::Format {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_dtable(path: &Path) -> Result<DTable> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    dtable_from_json(&text, path)
}

/// The shipped table: only the `alpha = 1/3` entry, upper constant unverified.
pub fn default_dtable() -> DTable {
    dtable_from_json(DEFAULT_DTABLE, Path::new("dtable_default.json")).expect("shipped table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcergo_core::kernels::{lazy_srw, GridStep};

    #[test]
    fn kernel_csv_round_trip() {
        let k = lazy_srw(GridStep::new(4).unwrap());
        let text = kernel_to_csv(&k);
        assert!(text.starts_with("0,0.25,0.5,0.75\n"));
        let back = kernel_from_csv(&text, Path::new("mem")).unwrap();
        assert_eq!(back.matrix(), k.matrix());
        assert_eq!(back.coords(), k.coords());
    }

    #[test]
    fn kernel_csv_without_coordinates() {
        let k = FiniteKernel::new(&[vec![0.5, 0.5], vec![0.25, 0.75]], None).unwrap();
        let back = kernel_from_csv(&kernel_to_csv(&k), Path::new("mem")).unwrap();
        assert!(back.coords().is_none());
    }

    #[test]
    fn shipped_table_loads() {
        let t = default_dtable();
        let e = t.get(1.0 / 3.0).unwrap();
        assert_eq!(e.lower, 1.0 / 12.0);
        assert!(!e.verified);
    }

    #[test]
    fn floats_print_shortest() {
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(30.0), "30");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
