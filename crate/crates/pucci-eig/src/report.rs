//! Serialization helpers shared by the command-line front end: a schema
//! tag for JSON documents, fixed-precision CSV formatting, and atomic
//! file output so partially written reports never reach disk.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Error;
use crate::Result;

/// Schema tag stamped into every JSON document this crate emits.
pub const SCHEMA: &str = "pucci-eig/1";

/// Pretty JSON with a trailing newline; field order follows the struct
/// definitions, so equal inputs serialize byte-for-byte equal.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Output(format!("JSON serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Decimal float formatting with 17 significant digits, enough to
/// round-trip any f64 exactly.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Quotes a CSV field only when it contains a delimiter, quote, or
/// newline.
pub fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// A CSV document built row by row; `to_string` renders header plus rows
/// with `\n` line endings.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(
            row.len(),
            self.header.len(),
            "CSV row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, field) in self.header.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&csv_escape(field));
        }
        out.push('\n');
        for row in &self.rows {
            for (i, field) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&csv_escape(field));
            }
            out.push('\n');
        }
        out
    }
}

/// Writes `content` to `path` atomically: the bytes land in a sibling
/// temporary file which is then renamed over the target, so readers never
/// observe a torn file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Output(format!("not a file path: {}", path.display())))?;
    let tmp_name = format!(".{}.tmp.{}", file_name.to_string_lossy(), std::process::id());
    let tmp_path = match dir {
        Some(d) => d.join(&tmp_name),
        None => Path::new(&tmp_name).to_path_buf(),
    };
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp_path)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
        Ok(())
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp_path);
        Error::Output(format!("writing {}: {e}", tmp_path.display()))
    })?;
    fs::rename(&tmp_path, path).map_err(|e| {
        let _ = fs::remove_file(&tmp_path);
        Error::Output(format!("renaming into {}: {e}", path.display()))
    })
}

/// Sends `content` to the file at `out` (atomically) or to stdout.
pub fn emit(content: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, content),
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| Error::Output(format!("stdout: {e}")))
        }
    }
}
