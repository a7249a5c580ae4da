//! Run manifests: tool version, resolved configuration, input digests, and
//! seeds, written next to every output so runs can be reproduced.
//!
//! The manifest is the only output that carries a timestamp; every table and
//! report an identical rerun produces is byte-identical.

use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub created_utc: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_algorithm: Option<&'static str>,
    pub config: C,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn input_digest(path: &Path) -> Result<InputDigest> {
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_file(path)?,
    })
}

impl<C: Serialize> RunManifest<C> {
    pub fn new(command: &'static str, config: C) -> Self {
        RunManifest {
            tool: "mfdfa",
            version: env!("CARGO_PKG_VERSION"),
            command,
            created_utc: chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            rng_algorithm: None,
            config,
        }
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self> {
        self.inputs.push(input_digest(path)?);
        Ok(self)
    }

    pub fn with_output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self.rng_algorithm = Some(mfdfa_core::RNG_ALGORITHM);
        self
    }

    /// Write `<base>.manifest.json` and return its path.
    pub fn write_next_to(&self, base: &Path) -> Result<PathBuf> {
        let path = manifest_path(base);
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json + "\n")
            .with_context(|| format!("cannot write manifest {}", path.display()))?;
        Ok(path)
    }
}

/// `out.csv` -> `out.csv.manifest.json`; `prefix` -> `prefix.manifest.json`.
pub fn manifest_path(base: &Path) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// File name (not path) of the manifest, for referencing in table headers.
pub fn manifest_name(base: &Path) -> String {
    manifest_path(base)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}
