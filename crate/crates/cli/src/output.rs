//! CSV and JSON artifacts. Every file starts with the tool version, the
//! artifact name and the full config.

use crate::config::ExperimentConfig;
use crate::CliError;
use num_complex::Complex64;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = concat!("hdlab ", env!("CARGO_PKG_VERSION"));

/// 17 significant digits: enough for any f64 to read back unchanged.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// One CSV cell or a `re,im` pair.
#[derive(Debug, Clone)]
pub enum Cell {
    Real(f64),
    Complex(Complex64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Real(v.unwrap_or(f64::NAN))
    }
}

/// Column header; complex columns expand to `name_re,name_im`.
#[derive(Debug, Clone, Copy)]
pub enum Column {
    Real(&'static str),
    Complex(&'static str),
}

pub struct Table {
    columns: Vec<Column>,
    notes: Vec<(String, String)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table { columns, notes: Vec::new(), rows: Vec::new() }
    }

    /// Extra `# key: value` header line.
    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_owned(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| match c {
                Column::Real(n) => vec![n.to_string()],
                Column::Complex(n) => vec![format!("{n}_re"), format!("{n}_im")],
            })
            .collect()
    }
}

fn header_lines(config: &ExperimentConfig) -> String {
    format!("# {VERSION}\n# artifact: {}\n# config: {}\n", config.command, config.to_json())
}

pub fn write_csv(dir: &Path, config: &ExperimentConfig, table: &Table) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{}.csv", config.command.stem()));
    let mut file = fs::File::create(&path)?;
    file.write_all(header_lines(config).as_bytes())?;
    for (k, v) in &table.notes {
        writeln!(file, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(table.header())?;
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .flat_map(|c| match c {
                Cell::Real(v) => vec![fmt_f64(*v)],
                Cell::Complex(z) => vec![fmt_f64(z.re), fmt_f64(z.im)],
                Cell::Int(i) => vec![i.to_string()],
                Cell::Text(s) => vec![s.clone()],
            })
            .collect();
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(path)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'a str,
    artifact: &'a str,
    config: &'a ExperimentConfig,
    result: &'a T,
}

pub fn write_json<T: Serialize>(dir: &Path, config: &ExperimentConfig, result: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{}.json", config.command.stem()));
    let env = Envelope { version: VERSION, artifact: config.command.name(), config, result };
    let text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

/// `# key: value` lines at the top of a CSV artifact.
pub fn read_header(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::MissingArtifact(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(": ").map(|(k, v)| (k.to_owned(), v.to_owned())))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }
}
