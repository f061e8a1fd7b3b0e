//! Content-addressed response cache.
//!
//! Keyed by the SHA-256 of the serialized request, so any change to role,
//! prompt text, or decoding parameters is a different entry. Entries are
//! written atomically (temp file + rename); a corrupt entry is treated as a
//! miss rather than an error so a damaged cache never blocks a run.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{ModelRequest, ModelResponse};

pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl AsRef<Path>) -> std::io::Result<DiskCache> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(DiskCache { dir })
    }

    pub fn key(request: &ModelRequest) -> String {
        let bytes = serde_json::to_vec(request).expect("request serialization is infallible");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        format!("{:x}", hasher.finalize())
    }

    fn entry_path(&self, request: &ModelRequest) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(request)))
    }

    pub fn get(&self, request: &ModelRequest) -> std::io::Result<Option<ModelResponse>> {
        let path = self.entry_path(request);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        match serde_json::from_str(&text) {
            Ok(response) => Ok(Some(response)),
            Err(_) => Ok(None),
        }
    }

    pub fn put(&self, request: &ModelRequest, response: &ModelResponse) -> std::io::Result<()> {
        let path = self.entry_path(request);
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(response)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
