//! The documentation index searched by the debugger.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gateway::{Embedder, GatewayError};
use crate::memory::rank;

/// Lines starting with this marker open a new snippet.
pub const SECTION_MARKER: &str = "## ";

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("the documentation corpus is empty")]
    Empty,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("embedding failed: {0}")]
    Embed(#[from] GatewayError),
    #[error("embedding of `{source_tag}` has dimension {got}, expected {expected}")]
    Dimension {
        source_tag: String,
        expected: usize,
        got: usize,
    },
    #[error("index was built with embedder `{index}`, not `{embedder}`")]
    EmbedderMismatch { index: String, embedder: String },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("index file does not parse: {0}")]
    Corrupt(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snippet {
    /// `file#Heading`, for citing the snippet.
    pub source: String,
    pub text: String,
    pub embedding: Vec<f64>,
}

/// A snippet chosen for a query, with its cosine score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedSnippet {
    pub source: String,
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocIndex {
    pub embedder: String,
    pub dim: usize,
    pub snippets: Vec<Snippet>,
}

/// Split one document into `(source, text)` sections. Text before the
/// first marker is a preamble and is not indexed.
pub fn split_sections(label: &str, text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if let Some(heading) = line.strip_prefix(SECTION_MARKER) {
            out.push((format!("{label}#{}", heading.trim()), String::new()));
        }
        if let Some((_, body)) = out.last_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    for (_, body) in &mut out {
        let trimmed = body.trim_end().to_string();
        *body = trimmed;
        body.push('\n');
    }
    out
}

impl DocIndex {
    /// An index with nothing in it. Retrieval returns no snippets.
    pub fn empty(embedder: &dyn Embedder) -> Self {
        DocIndex {
            embedder: embedder.id(),
            dim: embedder.dim(),
            snippets: Vec::new(),
        }
    }

    /// Index labelled documents, in the given order.
    pub fn build(
        documents: &[(String, String)],
        embedder: &dyn Embedder,
    ) -> Result<Self, DocError> {
        let mut index = DocIndex::empty(embedder);
        for (label, text) in documents {
            for (source, text) in split_sections(label, text) {
                let embedding = embedder.embed(&text)?;
                if embedding.len() != index.dim {
                    return Err(DocError::Dimension {
                        source_tag: source,
                        expected: index.dim,
                        got: embedding.len(),
                    });
                }
                index.snippets.push(Snippet {
                    source,
                    text,
                    embedding,
                });
            }
        }
        if index.snippets.is_empty() {
            return Err(DocError::Empty);
        }
        Ok(index)
    }

    /// Index files, labelled by file name.
    pub fn from_files(paths: &[PathBuf], embedder: &dyn Embedder) -> Result<Self, DocError> {
        let mut docs = Vec::new();
        for path in paths {
            let text = std::fs::read_to_string(path).map_err(|source| DocError::Io {
                path: path.clone(),
                source,
            })?;
            let label = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            docs.push((label, text));
        }
        DocIndex::build(&docs, embedder)
    }

    /// Index every `*.md` file in a directory, in file-name order.
    pub fn from_dir(dir: &Path, embedder: &dyn Embedder) -> Result<Self, DocError> {
        let entries = std::fs::read_dir(dir).map_err(|source| DocError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| DocError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "md") {
                paths.push(path);
            }
        }
        paths.sort();
        DocIndex::from_files(&paths, embedder)
    }

    pub fn len(&self) -> usize {
        self.snippets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snippets.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DocError> {
        Ok(serde_json::from_str(text)?)
    }

    /// The `k` snippets with the highest cosine against the query
    /// embedding, ties in index order.
    pub fn retrieve(
        &self,
        embedder: &dyn Embedder,
        query: &str,
        k: usize,
    ) -> Result<Vec<RetrievedSnippet>, DocError> {
        if embedder.id() != self.embedder {
            return Err(DocError::EmbedderMismatch {
                index: self.embedder.clone(),
                embedder: embedder.id(),
            });
        }
        let q = embedder.embed(query)?;
        self.retrieve_vector(&q, k)
    }

    pub fn retrieve_vector(
        &self,
        query: &[f64],
        k: usize,
    ) -> Result<Vec<RetrievedSnippet>, DocError> {
        if k == 0 {
            return Err(DocError::ZeroK);
        }
        if query.len() != self.dim {
            return Err(DocError::Dimension {
                source_tag: "query".to_string(),
                expected: self.dim,
                got: query.len(),
            });
        }
        let ranked = rank(
            query,
            self.snippets.iter().map(|s| s.embedding.as_slice()),
            k,
            f64::NEG_INFINITY,
        );
        Ok(ranked
            .into_iter()
            .map(|s| {
                let snippet = &self.snippets[s.index];
                RetrievedSnippet {
                    source: snippet.source.clone(),
                    text: snippet.text.clone(),
                    score: s.score,
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::HashedBow;

    #[test]
    fn preamble_is_skipped_and_headings_are_kept() {
        let s = split_sections(
            "a.md",
            "# Title\nintro\n\n## One\nfirst\n\n## Two\nsecond\n",
        );
        assert_eq!(
            s,
            [
                ("a.md#One".to_string(), "## One\nfirst\n".to_string()),
                ("a.md#Two".to_string(), "## Two\nsecond\n".to_string())
            ]
        );
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let e = HashedBow::default();
        assert!(matches!(DocIndex::build(&[], &e), Err(DocError::Empty)));
        let no_sections = [("x.md".to_string(), "# Only a title\n".to_string())];
        assert!(matches!(
            DocIndex::build(&no_sections, &e),
            Err(DocError::Empty)
        ));
    }

    #[test]
    fn zero_k_and_foreign_embedder_are_refused() {
        let e = HashedBow::default();
        let idx = DocIndex::build(&[("a.md".into(), "## A\nalpha\n".into())], &e).unwrap();
        assert!(matches!(idx.retrieve(&e, "alpha", 0), Err(DocError::ZeroK)));
        let other = HashedBow { dim: 64 };
        assert!(matches!(
            idx.retrieve(&other, "alpha", 1),
            Err(DocError::EmbedderMismatch { .. })
        ));
    }
}
