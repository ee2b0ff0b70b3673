//! Per-run artifact directories and their manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// The only field that differs between identical runs.
    pub created_at: String,
    pub files: Vec<ManifestEntry>,
}

/// A directory that collects a command's artifacts.
#[derive(Debug)]
pub struct RunDir {
    root: PathBuf,
    files: BTreeMap<String, ManifestEntry>,
}

impl RunDir {
    /// Create `root`, which must not exist or be empty.
    pub fn create(root: &Path) -> Result<RunDir, String> {
        if root.exists() {
            let mut entries = std::fs::read_dir(root)
                .map_err(|e| format!("cannot read {}: {e}", root.display()))?;
            if entries.next().is_some() {
                return Err(format!("output directory {} is not empty", root.display()));
            }
        }
        std::fs::create_dir_all(root)
            .map_err(|e| format!("cannot create {}: {e}", root.display()))?;
        Ok(RunDir {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    /// `runs/<UTC timestamp>-<command>` under the working directory.
    pub fn default_path(command: &str) -> PathBuf {
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
        PathBuf::from("runs").join(format!("{stamp}-{command}"))
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, content: &str) -> Result<(), String> {
        let path = self.root.join(name);
        std::fs::write(&path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        self.files.insert(
            name.to_string(),
            ManifestEntry {
                path: name.to_string(),
                bytes: content.len() as u64,
                sha256: hex::encode(Sha256::digest(content.as_bytes())),
            },
        );
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), String> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Write the manifest listing every artifact written so far.
    pub fn finish(self, command: &str) -> Result<PathBuf, String> {
        let manifest = Manifest {
            command: command.to_string(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            files: self.files.into_values().collect(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.root.join(MANIFEST);
        std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        Ok(self.root)
    }
}

/// The manifest with its timestamp removed.
pub fn normalized_manifest(text: &str) -> Result<Value, String> {
    let mut v: Value =
        serde_json::from_str(text).map_err(|e| format!("manifest does not parse: {e}"))?;
    match v.as_object_mut() {
        Some(m) => {
            m.remove("created_at");
            Ok(v)
        }
        None => Err("manifest is not an object".to_string()),
    }
}

/// Compare two run directories file by file, with manifests normalized.
pub fn compare_run_dirs(a: &Path, b: &Path) -> Result<(), String> {
    let list = |dir: &Path| -> Result<Vec<String>, String> {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .map_err(|e| format!("cannot read {}: {e}", dir.display()))?
            .filter_map(Result::ok)
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        Ok(names)
    };
    let (na, nb) = (list(a)?, list(b)?);
    if na != nb {
        return Err(format!("file sets differ: {na:?} vs {nb:?}"));
    }
    for name in na {
        let read = |dir: &Path| {
            std::fs::read_to_string(dir.join(&name)).map_err(|e| format!("{name}: {e}"))
        };
        let (ta, tb) = (read(a)?, read(b)?);
        let same = if name == MANIFEST {
            normalized_manifest(&ta)? == normalized_manifest(&tb)?
        } else {
            ta == tb
        };
        if !same {
            return Err(format!("{name} differs"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_hashes_and_comparison_ignores_time() {
        let tmp = tempfile::tempdir().unwrap();
        let mut dirs = Vec::new();
        for n in ["a", "b"] {
            let mut d = RunDir::create(&tmp.path().join(n)).unwrap();
            d.write("x.txt", "hello\n").unwrap();
            dirs.push(d.finish("test").unwrap());
        }
        let m: Manifest =
            serde_json::from_str(&std::fs::read_to_string(dirs[0].join(MANIFEST)).unwrap())
                .unwrap();
        assert_eq!(m.files.len(), 1);
        assert_eq!(m.files[0].sha256, hex::encode(Sha256::digest(b"hello\n")));
        compare_run_dirs(&dirs[0], &dirs[1]).unwrap();
        std::fs::write(dirs[1].join("x.txt"), "changed").unwrap();
        assert!(compare_run_dirs(&dirs[0], &dirs[1]).is_err());
    }

    #[test]
    fn non_empty_directories_are_refused() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join("f"), "").unwrap();
        assert!(RunDir::create(tmp.path()).is_err());
    }
}
