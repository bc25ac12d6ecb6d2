//! Output bundle: files written into the out-dir, each hashed into the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Effective configuration after overrides, with absolute paths.
    pub config: RunConfig,
    pub inputs: Vec<FileEntry>,
    pub run_seeds: Vec<u64>,
    pub outputs: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<FileEntry, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
    Ok(FileEntry {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

/// Collects outputs in the order they are written.
pub struct Bundle {
    dir: PathBuf,
    written: Vec<FileEntry>,
}

impl Bundle {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        self.written.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json` last; it lists every other file. Returns all files
    /// written, manifest included.
    pub fn finish(
        mut self,
        command: &str,
        config: &RunConfig,
        run_seeds: Vec<u64>,
    ) -> Result<Vec<FileEntry>, CliError> {
        let inputs = [
            &config.inputs.antennas,
            &config.inputs.population,
            &config.inputs.region,
            &config.inputs.spectrum,
        ]
        .into_iter()
        .map(|p| hash_file(p))
        .collect::<Result<Vec<_>, _>>()?;
        let manifest = Manifest {
            tool: "cellres",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            inputs,
            run_seeds,
            outputs: self.written.clone(),
        };
        self.write_json("manifest.json", &manifest)?;
        Ok(self.written)
    }
}

/// Shortest round-trip formatting; infinities print as `inf` / `-inf`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Serializes a header and rows as CSV.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}
