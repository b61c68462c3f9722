//! Data ingestion, result documents and atomic file output.

pub mod commands;
mod record;

pub use record::{write_atomic, RunRecord};

use std::io::Read;
use std::path::Path;

use crate::data;
use crate::dist::Dataset;
use crate::error::{Error, Result};

/// Parses positive reals separated by commas, whitespace or newlines.
///
/// A first line that contains no number at all is treated as a header.
/// Lines starting with `#` are comments. Reported rows are 1-based line
/// numbers of the input text.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if !seen_content {
            seen_content = true;
            if fields.iter().all(|f| f.parse::<f64>().is_err()) {
                continue;
            }
        }
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::InvalidData {
                row,
                msg: format!("`{f}` is not a number"),
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidData {
                    row,
                    msg: format!("{v} is not a positive finite value"),
                });
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    Dataset::new(values)
}

/// Loads a dataset from `builtin:<name>`, `-` (standard input) or a file path.
pub fn ingest(source: &str) -> Result<Dataset> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return data::builtin(name)
            .ok_or_else(|| Error::Config(format!("unknown builtin dataset `{name}`")));
    }
    let text = if source == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(Path::new(source))?
    };
    parse_dataset(&text)
}
