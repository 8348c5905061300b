use std::io::Write;
use std::path::Path;

use crate::CliError;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn io_err(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    let target = path.map_or("stdout".to_owned(), |p| p.display().to_string());
    CliError::Usage(format!("{target}: {e}"))
}

/// Writes `# …` header lines and a CSV table to `path`, or stdout.
pub fn write_table(
    path: Option<&Path>,
    header: &[String],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    for line in header {
        writeln!(buf, "# {line}").expect("write to memory");
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(columns).map_err(|e| io_err(path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    match path {
        Some(p) => std::fs::write(p, buf).map_err(|e| io_err(path, e)),
        None => std::io::stdout().write_all(&buf).map_err(|e| io_err(path, e)),
    }
}
