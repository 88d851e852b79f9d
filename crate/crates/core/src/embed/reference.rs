use std::hash::Hasher;

use fnv::FnvHasher;

use super::{EmbedError, EmbeddingVector};

/// 64-bit FNV-1a of the trigram's UTF-8 bytes.
pub fn trigram_hash(gram: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(gram.as_bytes());
    h.finish()
}

/// Lexical stand-in for a sentence encoder.
///
/// The text is lowercased and whitespace runs collapse to one space. Each
/// character trigram (or the whole text, if shorter than three characters)
/// hashes with [`trigram_hash`]; bucket `h % dimension` accumulates `+1`
/// when bit 63 of `h` is clear and `-1` otherwise. The result is
/// L2-normalised. Empty text yields the zero vector.
pub fn reference_embed(text: &str, dimension: usize) -> Result<EmbeddingVector, EmbedError> {
    if dimension < 8 {
        return Err(EmbedError::InvalidDimension(dimension));
    }
    let normalized: Vec<char> = text
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .chars()
        .collect();
    let mut acc = vec![0.0f64; dimension];
    if normalized.is_empty() {
        return Ok(EmbeddingVector::zeros(dimension));
    }
    let mut add = |gram: &[char]| {
        let s: String = gram.iter().collect();
        let h = trigram_hash(&s);
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        acc[(h % dimension as u64) as usize] += sign;
    };
    if normalized.len() < 3 {
        add(&normalized);
    } else {
        normalized.windows(3).for_each(&mut add);
    }
    Ok(EmbeddingVector::normalized(&acc))
}
