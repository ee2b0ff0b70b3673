use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::rank::rank;
use crate::gateway::{Embedder, GatewayError};

/// One stored correction and its embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub summary: String,
    pub embedding: Vec<f64>,
    /// Agent (or orchestrator flag) that asked for the entry.
    pub source: String,
    /// RFC 3339 creation time.
    pub created_at: String,
    pub embedder: String,
}

#[derive(Debug, thiserror::Error)]
pub enum MemoryError {
    #[error("memory summary is empty")]
    EmptySummary,
    #[error("store uses embedder `{store}`, entry or query uses `{other}`")]
    EmbedderMismatch { store: String, other: String },
    #[error("embedding has dimension {actual}, store expects {expected}")]
    Dimension { expected: usize, actual: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("threshold {0} is outside [-1, 1]")]
    Threshold(f64),
    #[error(transparent)]
    Embed(#[from] GatewayError),
    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("memory store i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// A retrieved entry and its similarity to the query.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved<'a> {
    pub entry: &'a MemoryEntry,
    pub score: f64,
}

/// Long-term store of correction summaries. Persisted, when a path is
/// set, as an append-only JSON Lines file: one [`MemoryEntry`] per line.
///
/// Readers take `&self` and writers `&mut self`; share it behind a
/// `RwLock` for concurrent pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct ProceduralStore {
    embedder: String,
    dim: usize,
    entries: Vec<MemoryEntry>,
    path: Option<PathBuf>,
}

impl ProceduralStore {
    pub fn in_memory(embedder: &dyn Embedder) -> Self {
        ProceduralStore {
            embedder: embedder.id(),
            dim: embedder.dim(),
            entries: Vec::new(),
            path: None,
        }
    }

    /// Load the store at `path`, creating nothing until the first write.
    pub fn open(path: &Path, embedder: &dyn Embedder) -> Result<Self, MemoryError> {
        let mut store = ProceduralStore {
            path: Some(path.to_path_buf()),
            ..ProceduralStore::in_memory(embedder)
        };
        if !path.exists() {
            return Ok(store);
        }
        let reader = BufReader::new(File::open(path)?);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |message: String| MemoryError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let entry: MemoryEntry =
                serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
            store.admit(&entry).map_err(|e| corrupt(e.to_string()))?;
            store.entries.push(entry);
        }
        Ok(store)
    }

    fn admit(&self, entry: &MemoryEntry) -> Result<(), MemoryError> {
        if entry.embedder != self.embedder {
            return Err(MemoryError::EmbedderMismatch {
                store: self.embedder.clone(),
                other: entry.embedder.clone(),
            });
        }
        if entry.embedding.len() != self.dim {
            return Err(MemoryError::Dimension {
                expected: self.dim,
                actual: entry.embedding.len(),
            });
        }
        Ok(())
    }

    fn check_embedder(&self, embedder: &dyn Embedder) -> Result<(), MemoryError> {
        if embedder.id() != self.embedder {
            return Err(MemoryError::EmbedderMismatch {
                store: self.embedder.clone(),
                other: embedder.id(),
            });
        }
        Ok(())
    }

    pub fn embedder_id(&self) -> &str {
        &self.embedder
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn entries(&self) -> &[MemoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Embed and append a summary, stamped with the current time.
    pub fn store(
        &mut self,
        embedder: &dyn Embedder,
        summary: &str,
        source: &str,
    ) -> Result<MemoryEntry, MemoryError> {
        let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        self.store_at(embedder, summary, source, &now)
    }

    /// [`ProceduralStore::store`] with an explicit creation time.
    pub fn store_at(
        &mut self,
        embedder: &dyn Embedder,
        summary: &str,
        source: &str,
        created_at: &str,
    ) -> Result<MemoryEntry, MemoryError> {
        if summary.trim().is_empty() {
            return Err(MemoryError::EmptySummary);
        }
        self.check_embedder(embedder)?;
        let entry = MemoryEntry {
            summary: summary.to_string(),
            embedding: embedder.embed(summary)?,
            source: source.to_string(),
            created_at: created_at.to_string(),
            embedder: self.embedder.clone(),
        };
        self.admit(&entry)?;
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            let line = serde_json::to_string(&entry).expect("entry serializes");
            writeln!(file, "{line}")?;
        }
        self.entries.push(entry.clone());
        Ok(entry)
    }

    /// Entries scoring at least `threshold` against `query`, best first,
    /// ties in insertion order, at most `k`.
    pub fn retrieve(
        &self,
        embedder: &dyn Embedder,
        query: &str,
        k: usize,
        threshold: f64,
    ) -> Result<Vec<Retrieved<'_>>, MemoryError> {
        if k == 0 {
            return Err(MemoryError::ZeroK);
        }
        if !(-1.0..=1.0).contains(&threshold) {
            return Err(MemoryError::Threshold(threshold));
        }
        if self.entries.is_empty() {
            return Ok(Vec::new());
        }
        self.check_embedder(embedder)?;
        let q = embedder.embed(query)?;
        self.retrieve_vector(&q, k, threshold)
    }

    /// Retrieval against a precomputed query embedding.
    pub fn retrieve_vector(
        &self,
        query: &[f64],
        k: usize,
        threshold: f64,
    ) -> Result<Vec<Retrieved<'_>>, MemoryError> {
        if query.len() != self.dim {
            return Err(MemoryError::Dimension {
                expected: self.dim,
                actual: query.len(),
            });
        }
        let ranked = rank(
            query,
            self.entries.iter().map(|e| e.embedding.as_slice()),
            k,
            threshold,
        );
        Ok(ranked
            .into_iter()
            .map(|s| Retrieved {
                entry: &self.entries[s.index],
                score: s.score,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{cosine, HashedBow};

    const FIG7: &str = "When the task involves taking food out of the fridge, append a goal to close the fridge (not (is_open fridge_305)).";

    #[test]
    fn stores_and_finds_the_fridge_instruction() {
        let e = HashedBow::default();
        let mut s = ProceduralStore::in_memory(&e);
        let entry = s.store(&e, FIG7, "goal").unwrap();
        assert!(entry.summary.contains("append a goal to close the fridge"));
        let hits = s.retrieve(&e, FIG7, 3, 0.35).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].score, 1.0);
        let hits = s
            .retrieve(&e, "Take the salmon from the fridge and heat it.", 3, 0.35)
            .unwrap();
        assert_eq!(hits.len(), 1, "fridge task should recall the note");
    }

    #[test]
    fn duplicates_are_kept_and_empty_summaries_refused() {
        let e = HashedBow::default();
        let mut s = ProceduralStore::in_memory(&e);
        s.store(&e, "a note", "goal").unwrap();
        s.store(&e, "a note", "goal").unwrap();
        assert_eq!(s.len(), 2);
        assert!(matches!(
            s.store(&e, "  ", "goal"),
            Err(MemoryError::EmptySummary)
        ));
        let hits = s.retrieve(&e, "a note", 5, -1.0).unwrap();
        assert_eq!(hits.len(), 2);
        assert!(std::ptr::eq(hits[0].entry, &s.entries()[0]));
    }

    #[test]
    fn empty_store_and_bad_arguments() {
        let e = HashedBow::default();
        let s = ProceduralStore::in_memory(&e);
        assert!(s.retrieve(&e, "x", 3, 0.35).unwrap().is_empty());
        assert!(matches!(
            s.retrieve(&e, "x", 0, 0.35),
            Err(MemoryError::ZeroK)
        ));
        assert!(matches!(
            s.retrieve(&e, "x", 1, 1.5),
            Err(MemoryError::Threshold(_))
        ));
    }

    #[test]
    fn persistence_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mem").join("store.jsonl");
        let e = HashedBow::default();
        let mut s = ProceduralStore::open(&path, &e).unwrap();
        s.store_at(&e, FIG7, "goal", "2025-01-01T00:00:00Z")
            .unwrap();
        s.store_at(
            &e,
            "stack smaller blocks on larger ones",
            "user",
            "2025-01-01T00:00:00Z",
        )
        .unwrap();
        let back = ProceduralStore::open(&path, &e).unwrap();
        assert_eq!(back.entries(), s.entries());
        let q = "close the fridge";
        let a: Vec<_> = s
            .retrieve(&e, q, 5, -1.0)
            .unwrap()
            .iter()
            .map(|r| (r.entry.summary.clone(), r.score))
            .collect();
        let b: Vec<_> = back
            .retrieve(&e, q, 5, -1.0)
            .unwrap()
            .iter()
            .map(|r| (r.entry.summary.clone(), r.score))
            .collect();
        assert_eq!(a, b);

        let other = HashedBow { dim: 64 };
        assert!(matches!(
            ProceduralStore::open(&path, &other),
            Err(MemoryError::Corrupt { line: 1, .. })
        ));
    }

    #[test]
    fn scores_are_symmetric() {
        let e = HashedBow::default();
        let texts = [
            "close the fridge",
            "fridge door open",
            "stack the blocks",
            "the the the",
        ];
        for a in texts {
            for b in texts {
                let (x, y) = (e.embed(a).unwrap(), e.embed(b).unwrap());
                assert_eq!(cosine(&x, &y), cosine(&y, &x));
            }
        }
    }
}
