use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// Provenance for one run. Everything except `duration_seconds` is a
/// function of the inputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    pub inputs: BTreeMap<String, InputFile>,
    pub resolved: Map<String, Value>,
    pub outputs: BTreeMap<String, String>,
    pub exit_code: i32,
    pub duration_seconds: f64,
}

/// Output directory that hashes what it writes and finishes with a
/// manifest.
pub struct RunOutput {
    dir: PathBuf,
    started: Instant,
    subcommand: &'static str,
    seed: u64,
    inputs: BTreeMap<String, InputFile>,
    outputs: BTreeMap<String, String>,
}

impl RunOutput {
    pub fn create(dir: &Path, subcommand: &'static str, seed: u64) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            subcommand,
            seed,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    /// Reads an input file, recording its hash.
    pub fn read_input(&mut self, role: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(
            role.to_string(),
            InputFile {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            },
        );
        Ok(bytes)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<u8>) -> Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn finish(self, resolved: Map<String, Value>, exit_code: i32) -> Result<i32> {
        let manifest = RunManifest {
            tool: "safeswitch",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: self.subcommand,
            seed: self.seed,
            inputs: self.inputs,
            resolved,
            outputs: self.outputs,
            exit_code,
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join(MANIFEST_NAME);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(exit_code)
    }
}
