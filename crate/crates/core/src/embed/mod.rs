//! Embedding vectors, providers and exact cosine ranking.

mod cache;
mod provider;
mod rank;
mod reference;

pub use cache::{content_key, CachedEmbedder, EmbeddingCache, CACHE_MAGIC};
pub use provider::{
    EmbeddingProvider, ProviderKind, ProviderSpec, ReferenceProvider, RemoteProvider,
};
pub use rank::{
    cosine_similarity, rank_documents, read_rankings, write_rankings, RankedEntry, RankedList,
};
pub use reference::{reference_embed, trigram_hash};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("embedding dimension {0} is below the minimum of 8")]
    InvalidDimension(usize),
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("invalid provider spec: {0}")]
    InvalidSpec(String),
    #[error("cache error: {0}")]
    Cache(#[from] std::io::Error),
}

/// Dense embedding. Non-empty texts embed to unit L2 norm; empty text
/// embeds to the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f32>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Self {
        Self { values }
    }

    pub fn zeros(dimension: usize) -> Self {
        Self { values: vec![0.0; dimension] }
    }

    /// Scales `values` to unit norm; all-zero input stays zero.
    pub fn normalized(values: &[f64]) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Self::zeros(values.len());
        }
        Self { values: values.iter().map(|v| (v / norm) as f32).collect() }
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}
