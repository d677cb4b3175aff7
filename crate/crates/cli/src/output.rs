//! Output directory handling. All files go through one [`OutputWriter`],
//! which records them for the manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Name of the field holding the only timestamp; excluded from byte comparisons.
pub const TIMESTAMP_FIELD: &str = "created_at";

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: &'static str,
}

pub struct OutputWriter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputWriter {
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self, WriteError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| WriteError {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    fn write_bytes(&mut self, name: &str, kind: &'static str, bytes: &[u8]) -> Result<(), WriteError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).map_err(|source| WriteError {
            path: path.clone(),
            source,
        })?;
        f.write_all(bytes).map_err(|source| WriteError { path, source })?;
        self.files.push(FileEntry {
            path: name.to_string(),
            kind,
        });
        Ok(())
    }

    /// Two-column series `t,value`.
    pub fn series(&mut self, name: &str, t: &[f64], v: &[f64]) -> Result<(), WriteError> {
        let rows = t.iter().zip(v).map(|(a, b)| vec![*a, *b]);
        self.table(name, &["t", "value"], rows)
    }

    pub fn table(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<f64>>,
    ) -> Result<(), WriteError> {
        let mut s = header.join(",");
        s.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.write_bytes(name, "csv", s.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), WriteError> {
        let mut s = serde_json::to_string_pretty(value).expect("report serialises");
        s.push('\n');
        self.write_bytes(name, "json", s.as_bytes())
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(self, command: &str, config: Value, extra: Value) -> Result<PathBuf, WriteError> {
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = json!({
            "schema_version": crate::config::SCHEMA_VERSION,
            "command": command,
            "config": config,
            "resolved": extra,
            "files": self.files,
            TIMESTAMP_FIELD: created_at,
        });
        let path = self.dir.join("manifest.json");
        let mut s = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        s.push('\n');
        fs::write(&path, s).map_err(|source| WriteError {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

/// Parses a manifest and drops the timestamp, for comparisons.
pub fn manifest_without_timestamp(text: &str) -> serde_json::Result<Value> {
    let mut v: Value = serde_json::from_str(text)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove(TIMESTAMP_FIELD);
    }
    Ok(v)
}
