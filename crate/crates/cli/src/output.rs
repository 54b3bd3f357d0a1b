//! File emission: CSV tables, JSON sidecars, output naming.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Sidecar schema version.
pub const SCHEMA: u32 = 1;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Where a command writes its files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputTarget {
    pub dir: PathBuf,
    pub prefix: Option<String>,
}

impl OutputTarget {
    /// `--out` wins over the config's `output.dir`, which wins over `.`.
    pub fn resolve(cfg: Option<&RunConfig>, out: Option<&Path>) -> Self {
        let from_cfg = cfg.and_then(|c| c.output.dir.as_deref()).map(PathBuf::from);
        OutputTarget {
            dir: out.map(Path::to_path_buf).or(from_cfg).unwrap_or_else(|| PathBuf::from(".")),
            prefix: cfg.and_then(|c| c.output.prefix.clone()),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        match &self.prefix {
            Some(p) => self.dir.join(format!("{p}_{name}")),
            None => self.dir.join(name),
        }
    }

    fn ensure_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|source| CliError::Write {
            path: self.dir.clone(),
            source,
        })
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        self.ensure_dir()?;
        let path = self.path(name);
        let werr = |e: csv::Error| CliError::Write {
            path: path.clone(),
            source: e.into(),
        };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(werr)?;
        w.write_record(header).map_err(werr)?;
        for row in rows {
            w.write_record(row).map_err(werr)?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        self.ensure_dir()?;
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).expect("json value serialises");
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

/// Fields common to every sidecar.
pub fn header(command: &str, cfg: &RunConfig, det_tol: f64) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": cfg.hash(),
        "config": cfg,
        "det_tol": det_tol,
    })
}

/// Merges `extra` into the object `base`.
pub fn extend(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}
