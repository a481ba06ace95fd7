//! Reports and CSV tables, written atomically into the output directory.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::CliError;

/// One curve or table; the header names the units of every column.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = f64>>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(fmt_f64).collect());
    }

    pub fn push_strings(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| CliError::Io(format!("{}: {e}", self.name)))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(format!("{}: {e}", self.name)))?;
        }
        w.into_inner().map_err(|e| CliError::Io(format!("{}: {e}", self.name)))
    }
}

/// Shortest round-trip text; infinities as `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        x.to_string()
    }
}

#[derive(Serialize)]
pub struct ScenarioInfo {
    pub name: Option<String>,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub command: &'a str,
    pub scenario: ScenarioInfo,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub seed: Option<u64>,
    pub modes: Option<usize>,
    pub result: T,
}

pub fn versions() -> BTreeMap<&'static str, &'static str> {
    let mut v: BTreeMap<_, _> = admlab_core::MODULE_VERSIONS.into_iter().collect();
    v.insert("cli", env!("CARGO_PKG_VERSION"));
    v
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let ctx = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(ctx)?;
    tmp.write_all(bytes).map_err(ctx)?;
    tmp.as_file().sync_all().map_err(ctx)?;
    tmp.persist(path).map_err(|e| ctx(e.error))?;
    Ok(())
}

pub struct Sink {
    pub dir: PathBuf,
}

impl Sink {
    pub fn new(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    pub fn json<T: Serialize>(&self, file: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.dir.join(file);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("{file}: {e}")))?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn table(&self, command: &str, t: &Table) -> Result<PathBuf, CliError> {
        let path = self.dir.join(format!("{command}_{}.csv", t.name));
        write_atomic(&path, &t.to_bytes()?)?;
        Ok(path)
    }
}
