//! Atomic file output, run manifests and the JSON schemas shipped in `docs/schemas`.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde_json::{json, Value};

pub const SCHEMAS: &[(&str, &str)] = &[
    ("manifest", include_str!("../../../docs/schemas/manifest.json")),
    ("characteristics-report", include_str!("../../../docs/schemas/characteristics-report.json")),
    ("basis", include_str!("../../../docs/schemas/basis.json")),
    ("synth-report", include_str!("../../../docs/schemas/synth-report.json")),
    ("ctmc-summary", include_str!("../../../docs/schemas/ctmc-summary.json")),
    ("diffusion-summary", include_str!("../../../docs/schemas/diffusion-summary.json")),
];

pub fn schema(name: &str) -> Result<Value> {
    let text = SCHEMAS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| anyhow!("unknown schema {name:?}; known: {}", schema_names().join(", ")))?;
    Ok(serde_json::from_str(text)?)
}

pub fn schema_names() -> Vec<&'static str> {
    SCHEMAS.iter().map(|(n, _)| *n).collect()
}

/// Error messages for `instance` against the named schema; empty when valid.
pub fn validate(name: &str, instance: &Value) -> Result<Vec<String>> {
    let v = jsonschema::validator_for(&schema(name)?).map_err(|e| anyhow!("schema {name}: {e}"))?;
    Ok(v.iter_errors(instance).map(|e| format!("{}: {e}", e.instance_path())).collect())
}

/// Collects the files of one run and writes each through a temporary file and a rename.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).with_context(|| format!("temp file in {}", self.dir.display()))?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).with_context(|| format!("writing {}", target.display()))?;
        self.written.push(name.to_string());
        Ok(target)
    }

    pub fn write_json(&mut self, name: &str, v: &Value) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.write(name, &s)
    }

    /// Writes `manifest.json`, which lists every file written before it.
    pub fn finish(mut self, command: &str, config: Value, seed: u64, workers: usize, exit_code: i32, run: Value) -> Result<()> {
        let m = json!({
            "tool": "bridgelab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "seed": seed,
            "workers": workers,
            "exit_code": exit_code,
            "outputs": self.written,
            "run": run,
        });
        self.write_json("manifest.json", &m)?;
        Ok(())
    }
}
