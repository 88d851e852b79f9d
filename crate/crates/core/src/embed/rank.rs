use std::cmp::Ordering;
use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingVector};
use crate::Execution;

/// `dot(a, b) / (|a| |b|)`, accumulated in f64 and clamped to `[-1, 1]`.
pub fn cosine_similarity<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64, EmbedError> {
    if a.len() != b.len() {
        return Err(EmbedError::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y): (f64, f64) = (x.into(), y.into());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub route_id: String,
    pub score: f64,
}

/// Full ranking for one query, best match first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn route_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.route_id.as_str())
    }
}

/// Descending score, then ascending route id.
pub(crate) fn entry_order(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.route_id.cmp(&b.route_id))
}

/// Exact ranking of every document by cosine similarity to `query`.
///
/// Scores are computed per document (in parallel under
/// [`Execution::Parallel`]) and sorted by descending score with ties broken
/// by ascending route id, so the output does not depend on input order.
pub fn rank_documents<S: AsRef<str> + Sync>(
    query_id: &str,
    query: &EmbeddingVector,
    docs: &[(S, EmbeddingVector)],
    exec: Execution,
) -> Result<RankedList, EmbedError> {
    let mut seen = HashSet::with_capacity(docs.len());
    for (id, _) in docs {
        if !seen.insert(id.as_ref()) {
            return Err(EmbedError::DuplicateId(id.as_ref().to_string()));
        }
    }
    let scored: Vec<Result<RankedEntry, EmbedError>> = exec.map(docs, |(id, v)| {
        cosine_similarity(query.values(), v.values())
            .map(|score| RankedEntry { route_id: id.as_ref().to_string(), score })
    });
    let mut entries = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    exec.sort_by(&mut entries, entry_order);
    Ok(RankedList { query_id: query_id.to_string(), entries })
}

#[derive(Debug, Serialize, Deserialize)]
struct RankingRow {
    query_id: String,
    rank: usize,
    route_id: String,
    score: f64,
}

/// CSV `query_id,rank,route_id,score` with 1-based ranks.
pub fn write_rankings<W: Write>(w: W, lists: &[RankedList]) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    for list in lists {
        for (i, e) in list.entries.iter().enumerate() {
            wtr.serialize(RankingRow {
                query_id: list.query_id.clone(),
                rank: i + 1,
                route_id: e.route_id.clone(),
                score: e.score,
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Inverse of [`write_rankings`]; lists come back in first-seen query order.
pub fn read_rankings<R: Read>(r: R) -> Result<Vec<RankedList>, csv::Error> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut lists: Vec<RankedList> = Vec::new();
    for row in rdr.deserialize() {
        let row: RankingRow = row?;
        if lists.last().map(|l| l.query_id != row.query_id).unwrap_or(true) {
            lists.push(RankedList { query_id: row.query_id.clone(), entries: Vec::new() });
        }
        let list = lists.last_mut().expect("pushed above");
        list.entries.push(RankedEntry { route_id: row.route_id, score: row.score });
    }
    Ok(lists)
}
