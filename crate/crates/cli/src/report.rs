//! Deterministic output formatting: every float is printed with 9
//! significant digits so identical runs produce identical bytes.

use std::io::Write;

use crate::error::CliError;

/// 9-significant-digit scientific form, e.g. `-4.93061443e-2`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.8e}")
}

/// The JSON value whose decimal form carries at most 9 significant digits:
/// the float is rounded through its 9-digit printed form first.
pub fn json_f64(x: f64) -> serde_json::Value {
    let rounded: f64 = fmt_f64(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

pub fn json_opt_f64(x: Option<f64>) -> serde_json::Value {
    x.map(json_f64).unwrap_or(serde_json::Value::Null)
}

/// One named table of string records.
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn to_csv_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.header)
            .and_then(|_| self.rows.iter().try_for_each(|r| w.write_record(r)))
            .map_err(|e| CliError::output(format!("writing CSV: {e}")))?;
        w.into_inner()
            .map_err(|e| CliError::output(format!("flushing CSV: {e}")))
    }
}

/// Writes tables as CSV. With an output path, each table goes to its own
/// file: a single table to the path itself, several tables to
/// `<stem>_<name>.<ext>` siblings. On stdout, tables are separated by a
/// `# <name>` marker line.
pub fn write_csv_tables(tables: &[Table], out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if tables.len() == 1 {
                std::fs::write(path, tables[0].to_csv_bytes()?)
                    .map_err(|e| CliError::output(format!("writing {}: {e}", path.display())))?;
            } else {
                for t in tables {
                    let target = suffixed(path, t.name);
                    std::fs::write(&target, t.to_csv_bytes()?).map_err(|e| {
                        CliError::output(format!("writing {}: {e}", target.display()))
                    })?;
                }
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (i, t) in tables.iter().enumerate() {
                let bytes = t.to_csv_bytes()?;
                if tables.len() > 1 {
                    if i > 0 {
                        writeln!(lock).map_err(CliError::stdout)?;
                    }
                    writeln!(lock, "# {}", t.name).map_err(CliError::stdout)?;
                }
                lock.write_all(&bytes).map_err(CliError::stdout)?;
            }
        }
    }
    Ok(())
}

/// `results.csv` + `measurements` -> `results_measurements.csv`.
fn suffixed(path: &std::path::Path, name: &str) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    path.with_file_name(format!("{stem}_{name}.{ext}"))
}

/// Writes one JSON object (pretty, trailing newline) to the path or stdout.
pub fn write_json(
    value: &serde_json::Value,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::output(format!("serializing JSON: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::output(format!("writing {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(CliError::stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_print_nine_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.00000000e0");
        assert_eq!(fmt_f64(-0.04930614433405491), "-4.93061443e-2");
        assert_eq!(fmt_f64(12345.6789), "1.23456789e4");
        assert_eq!(fmt_f64(0.0), "0.00000000e0");
    }

    #[test]
    fn json_floats_round_through_nine_digits() {
        let v = json_f64(0.1234567890123);
        assert_eq!(v.to_string(), "0.123456789");
        let exact = json_f64(0.25);
        assert_eq!(exact.to_string(), "0.25");
        assert_eq!(json_f64(f64::NAN), serde_json::Value::Null);
        assert_eq!(json_opt_f64(None), serde_json::Value::Null);
    }

    #[test]
    fn suffix_keeps_directory_and_extension() {
        let p = std::path::Path::new("/tmp/results.csv");
        assert_eq!(
            suffixed(p, "measurements"),
            std::path::Path::new("/tmp/results_measurements.csv")
        );
        let bare = std::path::Path::new("out");
        assert_eq!(suffixed(bare, "pmf"), std::path::Path::new("out_pmf.csv"));
    }
}
