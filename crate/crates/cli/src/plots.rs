//! gnuplot scripts for CSV artifacts.

use crate::output::{read_header, VERSION};
use crate::CliError;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

struct Artifact {
    path: PathBuf,
    name: String,
    notes: Vec<(String, String)>,
    columns: Vec<String>,
    /// raw lines before the first data row
    skip: usize,
    first_row: Vec<String>,
}

fn load(path: &Path) -> Result<Artifact, CliError> {
    if !path.is_file() {
        return Err(CliError::MissingArtifact(path.display().to_string()));
    }
    let notes = read_header(path)?;
    let name = notes
        .iter()
        .find(|(k, _)| k == "artifact")
        .map(|(_, v)| v.clone())
        .ok_or_else(|| CliError::MissingArtifact(format!("{} has no artifact header", path.display())))?;
    let text = fs::read_to_string(path)?;
    let comments = text.lines().take_while(|l| l.starts_with('#')).count();
    let mut body = text.lines().skip(comments);
    let columns: Vec<String> = body
        .next()
        .ok_or_else(|| CliError::MissingArtifact(format!("{} has no column row", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let first_row = body.next().map(|l| l.split(',').map(str::to_owned).collect()).unwrap_or_default();
    Ok(Artifact { path: path.to_owned(), name, notes, columns, skip: comments + 1, first_row })
}

impl Artifact {
    /// 1-based gnuplot column of `name`.
    fn col(&self, name: &str) -> Result<usize, CliError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| i + 1)
            .ok_or_else(|| CliError::MissingArtifact(format!("{}: no column {name}", self.path.display())))
    }

    fn note(&self, key: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn source(&self) -> String {
        format!("'{}' skip {}", self.path.display(), self.skip)
    }
}

/// Builds one self-contained gnuplot script covering all `artifacts`.
/// Each plot is written next to its CSV as a PNG.
pub fn emit_plots(artifacts: &[PathBuf]) -> Result<String, CliError> {
    if artifacts.is_empty() {
        return Err(CliError::MissingArtifact("no artifacts given".into()));
    }
    let mut s = String::new();
    writeln!(s, "# gnuplot script from {VERSION}").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    writeln!(s, "set grid").unwrap();
    for path in artifacts {
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            return Err(CliError::MissingArtifact(format!("{} is not a CSV artifact", path.display())));
        }
        let a = load(path)?;
        let png = path.with_extension("png");
        writeln!(s, "\n# {}", a.name).unwrap();
        writeln!(s, "reset session\nset datafile separator ','\nset grid").unwrap();
        writeln!(s, "set output '{}'", png.display()).unwrap();
        writeln!(s, "set title '{}'", a.name).unwrap();
        block(&mut s, &a)?;
        writeln!(s, "unset output").unwrap();
    }
    Ok(s)
}

fn block(s: &mut String, a: &Artifact) -> Result<(), CliError> {
    let src = a.source();
    match a.name.as_str() {
        "propagator trotter-converge" => {
            writeln!(s, "set logscale xy\nset xlabel 'N'\nset ylabel 'relative error'").unwrap();
            writeln!(s, "plot {src} using {}:{} with linespoints title 'Trotter error'", a.col("N")?, a.col("relative_error")?)
                .unwrap();
        }
        "nonlocal pf-check" => {
            writeln!(s, "set logscale xy\nset xlabel 'K'\nset ylabel 'max relative error'").unwrap();
            writeln!(s, "plot {src} using {}:{} with linespoints title 'partial fractions'", a.col("K")?, a.col("max_relative_error")?)
                .unwrap();
        }
        "lab divergence-scan" => {
            let verdict = a.note("verdict").unwrap_or("?");
            writeln!(s, "set logscale xy\nset xlabel 'cutoff R'\nset ylabel '|element|'").unwrap();
            writeln!(s, "plot {src} using {}:{} with linespoints title '{verdict}'", a.col("cutoff")?, a.col("magnitude")?)
                .unwrap();
        }
        "propagator euclid-pitfall" => {
            let tau = a.col("tau")?;
            let (re, im, h) = (a.col("inverted_re")?, a.col("inverted_im")?, a.col("harmonic")?);
            writeln!(s, "set xlabel 'tau'\nset ylabel 'ln|K(0,0;-i tau)|'").unwrap();
            if let Some(p) = a.note("detected_period").and_then(|v| v.parse::<f64>().ok()) {
                for k in 1..=3 {
                    writeln!(s, "set arrow from {}, graph 0 to {}, graph 1 nohead dt 2", k as f64 * p, k as f64 * p).unwrap();
                }
                writeln!(s, "set label 'detected period {p:.6}' at graph 0.02, graph 0.95").unwrap();
            }
            writeln!(
                s,
                "plot {src} using {tau}:(log(sqrt(${re}**2 + ${im}**2))) with lines title 'inverted, continued', \\\n     {src} using {tau}:(log(${h})) with lines title 'harmonic control'"
            )
            .unwrap();
        }
        "lab evolve" | "lab dilrot" => {
            let (t, n) = (a.col("t")?, a.col("norm")?);
            let n0: f64 = a
                .first_row
                .get(n - 1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CliError::MissingArtifact(format!("{} has no data rows", a.path.display())))?;
            writeln!(s, "set logscale y\nset xlabel 't'\nset ylabel '|norm - norm(0)|'").unwrap();
            writeln!(s, "plot {src} using {t}:(abs(${n} - {n0:.17e}) + 1e-18) with lines title 'norm drift'").unwrap();
        }
        _ => {
            writeln!(s, "set xlabel '{}'", a.columns[0]).unwrap();
            let numeric: Vec<usize> = (2..=a.columns.len())
                .filter(|&k| a.first_row.get(k - 1).is_some_and(|v| v.parse::<f64>().is_ok()))
                .collect();
            if numeric.is_empty() {
                return Err(CliError::MissingArtifact(format!("{} has no numeric columns", a.path.display())));
            }
            let parts: Vec<String> = numeric
                .iter()
                .map(|&k| format!("{src} using 1:{k} with lines title '{}'", a.columns[k - 1]))
                .collect();
            writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
        }
    }
    Ok(())
}
