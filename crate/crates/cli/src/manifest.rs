use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Writes files under one root and records each in the manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    manifest: Manifest,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root, manifest: Manifest::default() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, data: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, data).map_err(|e| CliError::io(&path, e))?;
        self.manifest.files.push(ManifestEntry {
            path: rel.to_string(),
            sha256: sha256_hex(data),
            bytes: data.len() as u64,
        });
        Ok(path)
    }

    /// Writes `manifest.json` (not listed in itself) and returns the manifest.
    pub fn finish(self) -> Result<Manifest> {
        let mut manifest = self.manifest;
        manifest.files.sort_by(|a, b| a.path.cmp(&b.path));
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.root.join(MANIFEST_NAME);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

/// Re-hashes every listed file; returns the paths that are missing or differ.
pub fn verify(root: &Path, manifest: &Manifest) -> Vec<String> {
    manifest
        .files
        .iter()
        .filter(|e| match fs::read(root.join(&e.path)) {
            Ok(data) => sha256_hex(&data) != e.sha256 || data.len() as u64 != e.bytes,
            Err(_) => true,
        })
        .map(|e| e.path.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_tracks_and_verifies_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path()).unwrap();
        w.write("b.txt", b"two").unwrap();
        w.write("sub/a.txt", b"one").unwrap();
        let m = w.finish().unwrap();
        assert_eq!(m.files.iter().map(|e| e.path.as_str()).collect::<Vec<_>>(), ["b.txt", "sub/a.txt"]);
        assert!(verify(dir.path(), &m).is_empty());
        fs::write(dir.path().join("b.txt"), b"changed").unwrap();
        assert_eq!(verify(dir.path(), &m), vec!["b.txt".to_string()]);
    }
}
