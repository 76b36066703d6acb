//! CSV and JSON artifacts.
//!
//! A CSV file starts with two comment lines, then plain rows:
//!
//! ```text
//! # eta [1],xi [1],...
//! #meta {"build":"…","seed":7,"config":{…}}
//! 0.2,0.0101,...
//! ```

use crate::error::{Result, WlabError};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Provenance embedded in every artifact.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Meta {
    pub build: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Meta {
    pub fn new(build: impl Into<String>, seed: u64, config: &impl Serialize) -> Result<Self> {
        Ok(Meta { build: build.into(), seed, config: serde_json::to_value(config)? })
    }
}

/// A named numeric column with its unit.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

pub fn col(name: &str, unit: &str) -> Column {
    Column { name: name.into(), unit: unit.into() }
}

/// Column-labelled numeric table.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(WlabError::Invalid(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header_line(&self) -> String {
        let cols: Vec<String> = self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
        format!("# {}", cols.join(","))
    }

    /// Writes the table as CSV; floats use Rust's shortest round-trip form.
    pub fn write_csv(&self, w: impl Write, meta: &Meta) -> Result<()> {
        let mut w = w;
        writeln!(w, "{}", self.header_line())?;
        writeln!(w, "#meta {}", serde_json::to_string(meta)?)?;
        let mut cw = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for r in &self.rows {
            cw.write_record(r.iter().map(|v| format!("{v:?}")))
                .map_err(|e| WlabError::Io(std::io::Error::other(e)))?;
        }
        cw.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, meta: &Meta) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f), meta)
    }

    /// Parses a file produced by [`Table::write_csv`].
    pub fn read_csv(text: &str) -> Result<(Table, Option<serde_json::Value>)> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| WlabError::Invalid("missing '#' column header".into()))?;
        let columns = header
            .split(',')
            .map(|c| {
                let (name, unit) = c
                    .trim()
                    .split_once(" [")
                    .ok_or_else(|| WlabError::Invalid(format!("column '{c}' has no unit")))?;
                Ok(col(name, unit.trim_end_matches(']')))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut meta = None;
        let mut body = String::new();
        for l in lines {
            if let Some(m) = l.strip_prefix("#meta ") {
                meta = Some(serde_json::from_str(m)?);
            } else if !l.starts_with('#') {
                body.push_str(l);
                body.push('\n');
            }
        }
        let mut t = Table::new(columns);
        let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
        for rec in rd.records() {
            let rec = rec.map_err(|e| WlabError::Invalid(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| WlabError::Invalid(format!("'{s}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            t.push(row)?;
        }
        Ok((t, meta))
    }
}

/// JSON summary `{ "meta": …, "report": … }`.
pub fn save_json(path: &Path, meta: &Meta, report: &impl Serialize) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, R> {
        meta: &'a Meta,
        report: &'a R,
    }
    let f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &Doc { meta, report })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(vec![col("eta", "1"), col("xi", "1")]);
        t.push(vec![0.2, 1.0 / 3.0]).unwrap();
        t.push(vec![0.1, -2.5e-7]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let meta = Meta::new("test", 7, &serde_json::json!({"grid": [1, 2]})).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &meta).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# eta [1],xi [1]\n#meta "));
        let (back, m) = Table::read_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(m.unwrap()["seed"], 7);
    }
}
