//! Run manifests: every result file embeds the deterministic part of its
//! manifest (command, semantic flags, seed, input digest, tool version) and
//! references the full manifest, which adds wall-clock timings and
//! execution-only settings and goes to stderr plus a `.manifest.json` sibling
//! of the output file. Keeping timings out of result payloads makes reruns
//! byte-identical.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The deterministic manifest subset embedded in result files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestCore {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_sha256: Option<String>,
    pub version: String,
}

impl ManifestCore {
    pub fn new(command: &str) -> Self {
        ManifestCore {
            command: command.to_string(),
            flags: BTreeMap::new(),
            seed: None,
            graph_sha256: None,
            version: TOOL_VERSION.to_string(),
        }
    }

    pub fn flag(mut self, key: &str, value: impl ToString) -> Self {
        self.flags.insert(key.to_string(), value.to_string());
        self
    }

    pub fn flag_opt(mut self, key: &str, value: Option<impl ToString>) -> Self {
        if let Some(v) = value {
            self.flags.insert(key.to_string(), v.to_string());
        }
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn graph_digest(mut self, bytes: &[u8]) -> Self {
        self.graph_sha256 = Some(sha256_hex(bytes));
        self
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Timing {
    pub sampling_ms: f64,
    pub mining_ms: f64,
    pub total_ms: f64,
}

/// The full manifest: deterministic core plus volatile run details.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub core: ManifestCore,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub timing: Timing,
}

impl RunManifest {
    /// Writes the full manifest to stderr and, when the result went to a
    /// file, to `<output>.manifest.json` next to it.
    pub fn emit(&self, output: Option<&Path>) -> std::io::Result<()> {
        let line = serde_json::to_string(self)?;
        eprintln!("{line}");
        if let Some(path) = output {
            let sibling = manifest_sibling(path);
            std::fs::write(sibling, format!("{line}\n"))?;
        }
        Ok(())
    }
}

pub fn manifest_sibling(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Writes `content` to the output path, or to stdout when none is given.
pub fn write_output(output: Option<&Path>, content: &[u8]) -> std::io::Result<()> {
    match output {
        Some(path) => std::fs::write(path, content),
        None => std::io::stdout().write_all(content),
    }
}
