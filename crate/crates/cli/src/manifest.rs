//! Run manifest: one per output directory, recording what produced it.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<String>,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// FNV-1a over the raw config bytes; enough to detect config drift.
pub fn config_hash(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    format!("{h:016x}")
}

pub struct ManifestBuilder {
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn start(command: &str, config_text: &str, seed: u64) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                command: command.to_string(),
                config_hash: config_hash(config_text),
                seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix_ms: now_ms(),
                finished_unix_ms: 0,
                outputs: Vec::new(),
            },
        }
    }

    pub fn record(&mut self, path: impl AsRef<Path>) {
        self.manifest.outputs.push(path.as_ref().display().to_string());
    }

    /// Writes manifest.json into `dir`.
    pub fn finish(mut self, dir: &Path) -> anyhow::Result<()> {
        self.manifest.finished_unix_ms = now_ms();
        self.manifest.outputs.sort();
        let body = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(dir.join("manifest.json"), body + "\n")?;
        Ok(())
    }
}

/// Operator mistakes (bad flags, refusing to overwrite) exit with code 1
/// instead of the runtime-failure code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Creates the output directory, refusing to reuse a non-empty one without
/// `force`.
pub fn prepare_out_dir(dir: &Path, force: bool) -> anyhow::Result<()> {
    if dir.exists() {
        let non_empty = std::fs::read_dir(dir)?.next().is_some();
        if non_empty && !force {
            return Err(anyhow::Error::new(UsageError(format!(
                "output directory {} is not empty; pass --force to overwrite",
                dir.display()
            ))));
        }
    }
    std::fs::create_dir_all(dir)?;
    Ok(())
}
