use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use sha2::{Digest, Sha256};

use super::{EmbedError, EmbeddingProvider, EmbeddingVector};
use crate::describe::estimate_token_count;
use crate::Execution;

/// File header; the trailing digit is the format version.
pub const CACHE_MAGIC: &[u8; 4] = b"TRV1";

pub type CacheKey = [u8; 16];

/// First 16 bytes of `SHA-256(model_name || 0x00 || text)`.
pub fn content_key(model_name: &str, text: &str) -> CacheKey {
    let mut h = Sha256::new();
    h.update(model_name.as_bytes());
    h.update([0u8]);
    h.update(text.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 16];
    key.copy_from_slice(&digest[..16]);
    key
}

/// Embedding store keyed by model and content hash.
///
/// On disk: [`CACHE_MAGIC`] followed by records of a 16-byte key, a
/// little-endian `u32` dimension and that many little-endian `f32`s. New
/// entries are appended. A truncated trailing record (an interrupted write)
/// is dropped when the file is opened. Readers share a lock; writes go
/// through a single appender.
pub struct EmbeddingCache {
    entries: RwLock<HashMap<CacheKey, EmbeddingVector>>,
    writer: Option<Mutex<BufWriter<File>>>,
    path: Option<PathBuf>,
}

impl std::fmt::Debug for EmbeddingCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmbeddingCache").field("path", &self.path).field("len", &self.len()).finish()
    }
}

fn parse_records(bytes: &[u8]) -> (HashMap<CacheKey, EmbeddingVector>, usize) {
    let mut entries = HashMap::new();
    let mut pos = CACHE_MAGIC.len();
    loop {
        if bytes.len() < pos + 20 {
            break;
        }
        let mut key = [0u8; 16];
        key.copy_from_slice(&bytes[pos..pos + 16]);
        let dim = u32::from_le_bytes(bytes[pos + 16..pos + 20].try_into().expect("4 bytes")) as usize;
        let end = pos + 20 + dim * 4;
        if bytes.len() < end {
            break;
        }
        let values = bytes[pos + 20..end]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        entries.insert(key, EmbeddingVector::new(values));
        pos = end;
    }
    (entries, pos)
}

fn encode_record(key: &CacheKey, v: &EmbeddingVector, out: &mut Vec<u8>) {
    out.extend_from_slice(key);
    out.extend_from_slice(&(v.dimension() as u32).to_le_bytes());
    for x in v.values() {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

impl EmbeddingCache {
    pub fn in_memory() -> Self {
        Self { entries: RwLock::new(HashMap::new()), writer: None, path: None }
    }

    /// Opens (or creates) a cache file.
    pub fn open(path: &Path) -> Result<Self, EmbedError> {
        let mut file = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let entries = if bytes.is_empty() {
            file.write_all(CACHE_MAGIC)?;
            HashMap::new()
        } else {
            if bytes.len() < CACHE_MAGIC.len() || &bytes[..4] != CACHE_MAGIC {
                return Err(EmbedError::Cache(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{} is not an embedding cache", path.display()),
                )));
            }
            let (entries, valid) = parse_records(&bytes);
            if valid < bytes.len() {
                log::warn!("dropping {} trailing bytes of {}", bytes.len() - valid, path.display());
                file.set_len(valid as u64)?;
            }
            entries
        };
        file.seek(SeekFrom::End(0))?;
        Ok(Self {
            entries: RwLock::new(entries),
            writer: Some(Mutex::new(BufWriter::new(file))),
            path: Some(path.to_path_buf()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &CacheKey) -> Option<EmbeddingVector> {
        self.entries.read().expect("cache lock").get(key).cloned()
    }

    pub fn contains(&self, key: &CacheKey) -> bool {
        self.entries.read().expect("cache lock").contains_key(key)
    }

    pub fn insert(&self, key: CacheKey, v: EmbeddingVector) -> Result<(), EmbedError> {
        self.insert_many(vec![(key, v)])
    }

    /// Inserts entries and appends them to the backing file, if any.
    pub fn insert_many(&self, items: Vec<(CacheKey, EmbeddingVector)>) -> Result<(), EmbedError> {
        if let Some(writer) = &self.writer {
            let mut buf = Vec::new();
            for (k, v) in &items {
                encode_record(k, v, &mut buf);
            }
            writer.lock().expect("cache writer").write_all(&buf)?;
        }
        let mut entries = self.entries.write().expect("cache lock");
        entries.extend(items);
        Ok(())
    }

    pub fn flush(&self) -> Result<(), EmbedError> {
        if let Some(writer) = &self.writer {
            writer.lock().expect("cache writer").flush()?;
        }
        Ok(())
    }

    /// Writes every entry to a fresh file at `path`, sorted by key.
    pub fn save_to(&self, path: &Path) -> Result<(), EmbedError> {
        let entries = self.entries.read().expect("cache lock");
        let mut keys: Vec<&CacheKey> = entries.keys().collect();
        keys.sort();
        let mut buf = CACHE_MAGIC.to_vec();
        for k in keys {
            encode_record(k, &entries[k], &mut buf);
        }
        std::fs::write(path, buf)?;
        Ok(())
    }
}

impl Drop for EmbeddingCache {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

/// Provider front-end that serves repeats from an [`EmbeddingCache`] and
/// sends the rest in batches.
pub struct CachedEmbedder<'a> {
    provider: &'a dyn EmbeddingProvider,
    cache: &'a EmbeddingCache,
    batch_size: usize,
    max_tokens: usize,
    exec: Execution,
}

impl<'a> CachedEmbedder<'a> {
    pub fn new(provider: &'a dyn EmbeddingProvider, cache: &'a EmbeddingCache) -> Self {
        Self { provider, cache, batch_size: 64, max_tokens: 512, exec: Execution::default() }
    }

    pub fn batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    pub fn max_tokens(mut self, n: usize) -> Self {
        self.max_tokens = n;
        self
    }

    pub fn execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Embeds `texts`, returning vectors in input order.
    pub fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let model = self.provider.model_name();
        let keys: Vec<CacheKey> = texts.iter().map(|t| content_key(&model, t)).collect();

        let mut queued = HashSet::new();
        let missing: Vec<(CacheKey, String)> = keys
            .iter()
            .zip(texts)
            .filter(|(k, _)| !self.cache.contains(k) && queued.insert(**k))
            .map(|(k, t)| (*k, t.clone()))
            .collect();

        for (_, t) in &missing {
            let tokens = estimate_token_count(t);
            if tokens > self.max_tokens {
                log::warn!("text of ~{tokens} tokens exceeds the model limit of {}", self.max_tokens);
            }
        }

        let batches: Vec<&[(CacheKey, String)]> = missing.chunks(self.batch_size).collect();
        let results = self.exec.map(&batches, |batch| {
            let texts: Vec<String> = batch.iter().map(|(_, t)| t.clone()).collect();
            self.provider.embed_batch(&texts)
        });
        for (batch, result) in batches.iter().zip(results) {
            let vectors = result?;
            if vectors.len() != batch.len() {
                return Err(EmbedError::MalformedResponse(format!(
                    "{} vectors for {} texts",
                    vectors.len(),
                    batch.len()
                )));
            }
            for v in &vectors {
                if v.dimension() != self.provider.dimension() {
                    return Err(EmbedError::DimensionMismatch {
                        expected: self.provider.dimension(),
                        actual: v.dimension(),
                    });
                }
            }
            self.cache.insert_many(batch.iter().map(|(k, _)| *k).zip(vectors).collect())?;
        }
        self.cache.flush()?;

        keys.iter()
            .map(|k| {
                self.cache
                    .get(k)
                    .ok_or_else(|| EmbedError::MalformedResponse("cache lost an entry".into()))
            })
            .collect()
    }
}
