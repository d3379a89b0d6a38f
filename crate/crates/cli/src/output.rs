//! File writers. Every float goes out with 17 significant digits so that
//! parsing the text gives back the same double.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Scientific notation with 17 significant digits; `inf`, `-inf`, `NaN`
/// otherwise. Rust's float parser reads all of these back exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(write_err(dir))
}

/// RFC 4180 CSV to any writer.
pub fn write_csv_to<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    let file = fs::File::create(path).map_err(write_err(path))?;
    write_csv_to(file, header, rows).map_err(|e| CliError::Write { path: path.to_path_buf(), source: e.into() })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    fs::write(path, to_json(value)).map_err(write_err(path))
}

/// Whitespace-separated two-column data with a `#` header line.
pub fn write_dat(path: &Path, notes: &[String], columns: (&str, &str), rows: &[(f64, f64)]) -> CliResult<()> {
    let mut text: String = notes.iter().map(|n| format!("# {n}\n")).collect();
    text.push_str(&format!("# {} {}\n", columns.0, columns.1));
    for (x, y) in rows {
        text.push_str(&format!("{} {}\n", fmt_f64(*x), fmt_f64(*y)));
    }
    fs::write(path, text).map_err(write_err(path))
}

/// A fresh directory named after the current local time under `parent`.
pub fn timestamped_dir(parent: &Path, prefix: &str) -> CliResult<PathBuf> {
    ensure_dir(parent)?;
    let stamp = chrono::Local::now().format("%Y%m%d-%H%M%S%.3f");
    let mut dir = parent.join(format!("{prefix}-{stamp}"));
    let mut n = 1;
    while dir.exists() {
        n += 1;
        dir = parent.join(format!("{prefix}-{stamp}-{n}"));
    }
    fs::create_dir(&dir).map_err(write_err(&dir))?;
    Ok(dir)
}
