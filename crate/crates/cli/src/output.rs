//! Artifact writer for one run.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

/// Every file name a subcommand can write.
const ARTIFACTS: [&str; 9] = [
    MANIFEST,
    "spectrum.csv",
    "effective.csv",
    "gate.json",
    "sampler.csv",
    "coverage.json",
    "magic_report.json",
    "trajectory.csv",
    "berry.json",
];

/// Output directory that records every file it writes.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    /// `protected` is an input file that must never be replaced.
    pub fn create(root: &Path, protected: Option<&Path>) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        let protected = protected.and_then(|p| p.canonicalize().ok());
        if let (Some(guard), Ok(dir)) = (&protected, root.canonicalize()) {
            let clash = ARTIFACTS.iter().any(|name| dir.join(name) == *guard);
            if clash {
                return Err(CliError::Write {
                    path: guard.clone(),
                    message: "the input config would be overwritten; choose another --out".into(),
                });
            }
        }
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    /// Names of the artifacts written so far, in write order.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<()> {
        let path = self.root.join(name);
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in rows {
            writer
                .serialize(row)
                .map_err(|e| CliError::Write { path: path.clone(), message: e.to_string() })?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Write { path: path.clone(), message: e.to_string() })?;
        self.write(name, &bytes)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Write {
            path: self.root.join(name),
            message: e.to_string(),
        })?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes the manifest last; it lists every other artifact.
    pub fn finish(mut self, manifest: &Value) -> Result<Vec<String>> {
        self.json(MANIFEST, manifest)?;
        Ok(self.written)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        debug_assert!(ARTIFACTS.contains(&name), "unlisted artifact {name}");
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }
}
