//! On-disk cache for chamber graphs, keyed by the scenario content hash.
//! A cached payload carries its own digest; any mismatch (corruption, manual
//! edits) falls back to recomputation.

use anyhow::Context;
use fano_census::scenario::GraphDto;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const CACHE_DIR_ENV: &str = "FANO_CENSUS_CACHE_DIR";

pub fn cache_dir() -> PathBuf {
    if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
        return PathBuf::from(dir);
    }
    std::env::temp_dir().join("fano-census-cache")
}

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    format!("{:x}", hasher.finalize())
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    payload_hash: String,
    payload: String,
}

fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

/// Load a cached graph; returns None when missing, unparsable or corrupted.
pub fn load(dir: &Path, key: &str) -> Option<GraphDto> {
    let path = entry_path(dir, key);
    let data = std::fs::read_to_string(path).ok()?;
    let file: CacheFile = serde_json::from_str(&data).ok()?;
    if sha256_hex(&file.payload) != file.payload_hash {
        return None;
    }
    serde_json::from_str(&file.payload).ok()
}

pub fn store(dir: &Path, key: &str, dto: &GraphDto) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating cache directory {}", dir.display()))?;
    let payload = serde_json::to_string(dto)?;
    let file = CacheFile {
        payload_hash: sha256_hex(&payload),
        payload,
    };
    let path = entry_path(dir, key);
    std::fs::write(&path, serde_json::to_string(&file)?)
        .with_context(|| format!("writing cache entry {}", path.display()))?;
    Ok(())
}

pub fn clear(dir: &Path) -> anyhow::Result<usize> {
    let mut removed = 0;
    if dir.exists() {
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            if entry
                .path()
                .extension()
                .map(|e| e == "json")
                .unwrap_or(false)
            {
                std::fs::remove_file(entry.path())?;
                removed += 1;
            }
        }
    }
    Ok(removed)
}

pub fn status(dir: &Path) -> anyhow::Result<Vec<(String, u64)>> {
    let mut entries = Vec::new();
    if dir.exists() {
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            if entry
                .path()
                .extension()
                .map(|e| e == "json")
                .unwrap_or(false)
            {
                let name = entry
                    .path()
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_default();
                entries.push((name, entry.metadata()?.len()));
            }
        }
    }
    entries.sort();
    Ok(entries)
}
