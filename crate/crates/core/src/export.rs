//! CSV and JSON writers shared by the modules.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Numeric CSV with a header; floats use the shortest round-trip form.
pub fn write_numeric_csv<W: Write>(out: W, header: &[String], rows: &[Vec<f64>]) -> Result<(), ExportError> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(header)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_numeric_csv_file(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<(), ExportError> {
    let file = std::fs::File::create(path)?;
    write_numeric_csv(std::io::BufWriter::new(file), header, rows)
}

pub fn write_json_file<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), ExportError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
