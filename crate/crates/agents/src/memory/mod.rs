//! Agent memory: a bounded per-session context buffer and a long-term
//! procedural store of correction summaries retrieved by cosine similarity.

mod context;
mod procedural;
mod rank;

pub use context::ContextBuffer;
pub use procedural::{MemoryEntry, MemoryError, ProceduralStore, Retrieved};
pub use rank::{compare_scores, rank, Scored};

/// Similarity floor for pipeline retrieval.
pub const DEFAULT_THRESHOLD: f64 = 0.35;
/// Entries retrieved per agent at generation start.
pub const DEFAULT_K: usize = 3;

/// Label that opens the system message carrying retrieved notes.
pub const MEMORY_HEADER: &str = "Procedural memory (corrections saved from earlier sessions):";

/// Format retrieved summaries as the pinned memory message body.
pub fn memory_note(summaries: &[&str]) -> String {
    let mut s = String::from(MEMORY_HEADER);
    for line in summaries {
        s.push_str("\n- ");
        s.push_str(line);
    }
    s
}
