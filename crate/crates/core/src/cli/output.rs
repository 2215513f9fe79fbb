use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::Result;

/// Recorded in every header: results are bit-reproducible for a given build
/// and platform, not across libm implementations.
pub const FLOAT_DISCLAIMER: &str =
    "bit-identical for identical (config, seed) on one platform and build; last-digit differences across libm implementations are possible";

/// SHA-256 of the canonical JSON of `{command, params, seed}`.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::json!({ "command": cfg.command, "params": cfg.params, "seed": cfg.seed });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `{version, config_hash, grid, seed, float}`.
pub fn metadata(cfg: &RunConfig, grid: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command,
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "grid": grid,
        "float": FLOAT_DISCLAIMER,
    })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Collects emitted files for the run summary.
#[derive(Debug, Default)]
pub struct Emitter {
    dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(dir: &Path) -> Self {
        Emitter { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }

    /// Pretty JSON with the metadata under `"meta"`.
    pub fn json(&mut self, name: &str, meta: &serde_json::Value, body: serde_json::Value) -> Result<()> {
        let doc = serde_json::json!({ "meta": meta, "data": body });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    /// Runs a CSV writer into memory, then writes atomically.
    pub fn csv<F>(&mut self, name: &str, write: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.bytes(name, &buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Command;

    #[test]
    fn hash_ignores_output_dir_only() {
        let mut a = RunConfig::new(Command::Verify);
        a.params = serde_json::json!({"suite": "duhamel"});
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        b.seed = 7;
        assert_ne!(config_hash(&a), config_hash(&b));
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("x.json");
        write_atomic(&path, b"{}").unwrap();
        write_atomic(&path, b"[1]").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "[1]");
        let names: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().collect();
        assert_eq!(names.len(), 1);
    }
}
