//! Deterministic artifact serialization. Every file carries a provenance
//! header (tool version + config hash), floats go out with 17 significant
//! digits, line endings are LF, and nothing time- or host-dependent is
//! written, so identical inputs give byte-identical outputs.

use std::path::Path;

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Provenance {
    pub config_sha256: String,
}

/// 17 significant digits, lossless for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with `#` provenance comments, a header row, LF endings.
pub struct Csv {
    lines: Vec<String>,
    width: usize,
}

impl Csv {
    pub fn new(prov: &Provenance, columns: &[&str]) -> Csv {
        Csv {
            lines: vec![
                format!("# lrosc {TOOL_VERSION}"),
                format!("# config_sha256 {}", prov.config_sha256),
                columns.join(","),
            ],
            width: columns.len(),
        }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.width, "csv row width mismatch");
        self.lines.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }
}

/// Wrap a JSON object with the provenance fields. Keys serialize sorted
/// (serde_json's map is ordered), keeping output deterministic.
pub fn json_with_provenance(
    prov: &Provenance,
    mut body: serde_json::Map<String, serde_json::Value>,
) -> serde_json::Value {
    body.insert(
        "tool_version".into(),
        serde_json::Value::String(TOOL_VERSION.into()),
    );
    body.insert(
        "config_sha256".into(),
        serde_json::Value::String(prov.config_sha256.clone()),
    );
    serde_json::Value::Object(body)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("json serialize: {e}")))?;
    write_text(path, &format!("{text}\n"))
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}
