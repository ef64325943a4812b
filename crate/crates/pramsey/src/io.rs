use std::fs;
use std::path::{Path, PathBuf};

use pramsey_core::geometry::squared_distance_matrix;
use pramsey_core::{PointConfig, SquaredDistanceMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Pretty JSON with object keys sorted and a trailing newline.
///
/// Floats use the shortest round-trip representation, rationals are already
/// `"p/q"` strings, so equal values always give equal bytes.
pub fn canonical_json<T: Serialize>(value: &T) -> CliResult<String> {
    // serde_json's map is a BTreeMap here, so going through Value sorts keys.
    let v = serde_json::to_value(value).map_err(|e| CliError::Invalid(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Invalid(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// A point set given either as a PointConfig or as a squared distance matrix.
pub fn read_distances(path: &Path) -> CliResult<SquaredDistanceMatrix> {
    let v: serde_json::Value = read_json(path)?;
    if v.get("sq").is_some() {
        serde_json::from_value(v).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    } else {
        let c: PointConfig =
            serde_json::from_value(v).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        c.validate()?;
        Ok(squared_distance_matrix(&c))
    }
}

pub fn read_points(path: &Path) -> CliResult<PointConfig> {
    let c: PointConfig = read_json(path)?;
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub params: serde_json::Value,
    pub seed: u64,
    pub version: String,
    /// Output file name to SHA-256 of its bytes.
    pub outputs: std::collections::BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[&Path], params: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Default::default(),
        }
    }

    /// Writes `contents` atomically and records its digest.
    pub fn emit(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        write_atomic(path, contents)?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.insert(name, digest(contents.as_bytes()));
        Ok(())
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, &canonical_json(self)?)
    }
}

/// `dir/name.json` for a directory, `stem.kind.json` next to a `.json` path.
pub fn sibling(out: &Path, kind: &str) -> PathBuf {
    match out.extension() {
        Some(e) if e == "json" => {
            let stem = out.file_stem().unwrap().to_string_lossy();
            out.with_file_name(format!("{stem}.{kind}.json"))
        }
        _ => out.join(format!("{kind}.json")),
    }
}
