//! CSV serialization: `#`-prefixed metadata header, comma separator, LF
//! line endings, floats at 17 significant digits so parsing recovers the
//! exact bits. Files land via a temporary in the target directory and an
//! atomic rename, so readers never observe partial output.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// One cell of a report row: a label or an exactly serialized float.
pub enum Cell {
    Text(String),
    Num(f64),
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => fmt_f64(*v),
        }
    }
}

pub fn write_csv(
    path: &Path,
    comments: &[String],
    columns: &[&str],
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| CliError::Io(format!("cannot create temporary file: {e}")))?;
    let mut body = String::new();
    for line in comments {
        body.push_str("# ");
        body.push_str(line);
        body.push('\n');
    }
    body.push_str(&columns.join(","));
    body.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        body.push_str(&cells.join(","));
        body.push('\n');
    }
    tmp.write_all(body.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("cannot persist {}: {e}", path.display())))?;
    Ok(())
}

/// Parsed CSV: comment lines (prefix stripped), column names, raw cells.
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_csv(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut comments = Vec::new();
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            comments.push(rest.trim_start().to_string());
        } else if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    Ok(Table {
        comments,
        columns,
        rows,
    })
}
