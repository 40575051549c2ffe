//! Report documents: JSON with a separate timing block, or one CSV row per
//! state. All writes are atomic.

use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::Failure;

/// A number that refuses to serialize unless finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite number {} in report", self.0)));
        }
        s.serialize_f64(self.0)
    }
}

pub fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub parameters: IndexMap<String, Value>,
}

impl Meta {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            parameters: IndexMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.into(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }
}

/// One row of the per-state table.
#[derive(Debug, Clone, Serialize)]
pub struct StateRow {
    pub state: String,
    pub columns: IndexMap<String, Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<R: Serialize> {
    pub meta: Meta,
    pub result: R,
    pub states: Vec<StateRow>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub wall_seconds: Num,
}

impl<R: Serialize> Report<R> {
    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|s| s + "\n")
                .map_err(|e| Failure { code: crate::error::EXIT_NONCONVERGENCE, message: e.to_string() }),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = std::iter::once("state")
            .chain(self.states.first().into_iter().flat_map(|r| r.columns.keys().map(String::as_str)))
            .collect();
        let io = |e: csv::Error| Failure::io(e.to_string());
        w.write_record(&header).map_err(io)?;
        for row in &self.states {
            if let Some(bad) = row.columns.values().find(|v| !v.0.is_finite()) {
                return Err(Failure {
                    code: crate::error::EXIT_NONCONVERGENCE,
                    message: format!("non-finite number {} in report", bad.0),
                });
            }
            let record: Vec<String> =
                std::iter::once(row.state.clone()).chain(row.columns.values().map(|v| format!("{}", v.0))).collect();
            w.write_record(&record).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes()).map_err(|e| Failure::io(format!("stdout: {e}")))
        }
        Some(path) => write_atomic(path, content),
    }
}

pub fn write_atomic(path: &Path, content: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(content.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
