//! Cosine ranking shared by procedural memory and the documentation index.

use std::cmp::Ordering;

use crate::gateway::cosine;

/// A candidate's position in its collection and its cosine score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub index: usize,
    pub score: f64,
}

/// Largest magnitude for which integral vectors are compared exactly.
const EXACT_LIMIT: f64 = (1u64 << 31) as f64;

fn integral(v: &[f64]) -> bool {
    v.iter().all(|x| x.fract() == 0.0 && x.abs() < EXACT_LIMIT)
}

/// Dot product with the query and squared norm, in exact integers.
fn exact_parts(query: &[f64], v: &[f64]) -> (i128, i128) {
    let dot = query
        .iter()
        .zip(v)
        .map(|(a, b)| *a as i128 * *b as i128)
        .sum();
    let norm = v.iter().map(|x| (*x as i128) * (*x as i128)).sum();
    (dot, norm)
}

/// Order two candidates by cosine against one query, largest first.
///
/// When every vector is integral (the bundled embedder produces counts)
/// the comparison is exact: the query norm is common to both sides, so
/// `d1/√n1` against `d2/√n2` reduces to comparing `d1²·n2` with `d2²·n1`
/// once signs are settled. Otherwise the f64 scores are compared.
pub fn compare_scores(query: &[f64], a: (&[f64], f64), b: (&[f64], f64)) -> Ordering {
    if integral(query) && integral(a.0) && integral(b.0) {
        let (da, na) = exact_parts(query, a.0);
        let (db, nb) = exact_parts(query, b.0);
        let qn: i128 = query.iter().map(|x| (*x as i128) * (*x as i128)).sum();
        // Zero vectors score 0 whatever the dot product says.
        let (da, na) = if na == 0 || qn == 0 { (0, 1) } else { (da, na) };
        let (db, nb) = if nb == 0 || qn == 0 { (0, 1) } else { (db, nb) };
        let sign = da.signum().cmp(&db.signum());
        if sign != Ordering::Equal || da == 0 {
            return sign.reverse();
        }
        let lhs = da * da * nb;
        let rhs = db * db * na;
        let by_magnitude = lhs.cmp(&rhs);
        return if da > 0 {
            by_magnitude.reverse()
        } else {
            by_magnitude
        };
    }
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal)
}

/// Score every candidate, keep those with score ≥ `threshold`, sort
/// descending (ties by position) and truncate to `k`.
pub fn rank<'a>(
    query: &[f64],
    candidates: impl IntoIterator<Item = &'a [f64]>,
    k: usize,
    threshold: f64,
) -> Vec<Scored> {
    let vectors: Vec<&[f64]> = candidates.into_iter().collect();
    let mut scored: Vec<Scored> = vectors
        .iter()
        .enumerate()
        .map(|(index, v)| Scored {
            index,
            score: cosine(query, v),
        })
        .filter(|s| s.score >= threshold)
        .collect();
    // Stable sort keeps insertion order among exact ties.
    scored.sort_by(|x, y| {
        compare_scores(
            query,
            (vectors[x.index], x.score),
            (vectors[y.index], y.score),
        )
    });
    scored.truncate(k);
    scored
}
