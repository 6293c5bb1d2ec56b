use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

/// 17 significant digits, `.` as decimal separator.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Rows as a JSON array of objects keyed by the header.
pub fn json_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> anyhow::Result<String> {
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = rows
        .into_iter()
        .map(|r| header.iter().map(|h| h.to_string()).zip(r.into_iter().map(serde_json::Value::from)).collect())
        .collect();
    json(&rows)
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
