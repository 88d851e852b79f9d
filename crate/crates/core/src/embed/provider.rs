use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{reference_embed, EmbedError, EmbeddingVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Reference,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderSpec {
    pub kind: ProviderKind,
    pub dimension: usize,
    pub endpoint: Option<String>,
    pub model_name: Option<String>,
    /// Sequence limit of the model; longer inputs are warned about, not cut.
    pub max_tokens: usize,
    pub batch_size: usize,
    pub timeout_secs: u64,
    pub retries: u32,
}

impl Default for ProviderSpec {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Reference,
            dimension: 256,
            endpoint: None,
            model_name: None,
            max_tokens: 384,
            batch_size: 64,
            timeout_secs: 30,
            retries: 2,
        }
    }
}

impl ProviderSpec {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.dimension < 8 {
            return Err(EmbedError::InvalidDimension(self.dimension));
        }
        if self.max_tokens == 0 || self.batch_size == 0 {
            return Err(EmbedError::InvalidSpec("max_tokens and batch_size must be positive".into()));
        }
        if self.kind == ProviderKind::Remote {
            if self.endpoint.as_deref().is_none_or(str::is_empty) {
                return Err(EmbedError::InvalidSpec("remote provider needs an endpoint".into()));
            }
            if self.model_name.as_deref().is_none_or(str::is_empty) {
                return Err(EmbedError::InvalidSpec("remote provider needs a model_name".into()));
            }
        }
        Ok(())
    }

    /// Name used in cache keys and reports.
    pub fn effective_model_name(&self) -> String {
        match self.kind {
            ProviderKind::Reference => format!("reference-trigram-{}", self.dimension),
            ProviderKind::Remote => self.model_name.clone().unwrap_or_default(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn EmbeddingProvider>, EmbedError> {
        self.validate()?;
        Ok(match self.kind {
            ProviderKind::Reference => Box::new(ReferenceProvider::new(self.dimension)?),
            ProviderKind::Remote => Box::new(RemoteProvider::new(self.clone())?),
        })
    }
}

pub trait EmbeddingProvider: Send + Sync {
    fn model_name(&self) -> String;
    fn dimension(&self) -> usize;
    /// One vector per text, in order.
    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError>;
}

#[derive(Debug, Clone)]
pub struct ReferenceProvider {
    dimension: usize,
}

impl ReferenceProvider {
    pub fn new(dimension: usize) -> Result<Self, EmbedError> {
        if dimension < 8 {
            return Err(EmbedError::InvalidDimension(dimension));
        }
        Ok(Self { dimension })
    }
}

impl EmbeddingProvider for ReferenceProvider {
    fn model_name(&self) -> String {
        format!("reference-trigram-{}", self.dimension)
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        texts.iter().map(|t| reference_embed(t, self.dimension)).collect()
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

/// HTTP client for an external embedding service.
///
/// Request: `POST {endpoint}` with `{"model": ..., "texts": [...]}`.
/// Response: `{"vectors": [[...], ...]}`, one row per text in order. Rows are
/// re-normalised locally. Transport failures and 5xx responses are retried.
pub struct RemoteProvider {
    spec: ProviderSpec,
    agent: ureq::Agent,
}

impl RemoteProvider {
    pub fn new(spec: ProviderSpec) -> Result<Self, EmbedError> {
        let spec = ProviderSpec { kind: ProviderKind::Remote, ..spec };
        spec.validate()?;
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(spec.timeout_secs.max(1))))
            .http_status_as_error(false)
            .build();
        Ok(Self { spec, agent: ureq::Agent::new_with_config(config) })
    }

    fn endpoint(&self) -> &str {
        self.spec.endpoint.as_deref().unwrap_or_default()
    }

    fn request_once(&self, texts: &[String]) -> Result<Result<String, EmbedError>, EmbedError> {
        let model = self.spec.model_name.as_deref().unwrap_or_default();
        let resp = self.agent.post(self.endpoint()).send_json(EmbedRequest { model, texts });
        let mut resp = match resp {
            Ok(r) => r,
            // retryable
            Err(e) => return Err(EmbedError::Transport(e.to_string())),
        };
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        if status >= 500 {
            return Err(EmbedError::Transport(format!("server returned {status}")));
        }
        if status >= 400 {
            return Ok(Err(EmbedError::Transport(format!("server returned {status}: {body}"))));
        }
        Ok(Ok(body))
    }
}

impl EmbeddingProvider for RemoteProvider {
    fn model_name(&self) -> String {
        self.spec.effective_model_name()
    }

    fn dimension(&self) -> usize {
        self.spec.dimension
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let mut attempt = 0;
        let body = loop {
            match self.request_once(texts) {
                Ok(result) => break result?,
                Err(e) if attempt >= self.spec.retries => return Err(e),
                Err(e) => {
                    log::warn!("embedding request failed (attempt {}): {e}", attempt + 1);
                    attempt += 1;
                }
            }
        };
        let parsed: EmbedResponse =
            serde_json::from_str(&body).map_err(|e| EmbedError::MalformedResponse(e.to_string()))?;
        if parsed.vectors.len() != texts.len() {
            return Err(EmbedError::MalformedResponse(format!(
                "{} vectors for {} texts",
                parsed.vectors.len(),
                texts.len()
            )));
        }
        parsed
            .vectors
            .iter()
            .map(|row| {
                if row.len() != self.spec.dimension {
                    return Err(EmbedError::DimensionMismatch {
                        expected: self.spec.dimension,
                        actual: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(EmbedError::MalformedResponse("non-finite component".into()));
                }
                Ok(EmbeddingVector::normalized(row))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(ProviderSpec::default().validate().is_ok());
        let small = ProviderSpec { dimension: 4, ..Default::default() };
        assert!(matches!(small.validate(), Err(EmbedError::InvalidDimension(4))));
        let remote = ProviderSpec { kind: ProviderKind::Remote, ..Default::default() };
        assert!(matches!(remote.validate(), Err(EmbedError::InvalidSpec(_))));
        let remote = ProviderSpec {
            kind: ProviderKind::Remote,
            endpoint: Some("http://127.0.0.1:1/embed".into()),
            model_name: Some("multi-qa-MiniLM-L6-cos-v1".into()),
            ..Default::default()
        };
        assert!(remote.validate().is_ok());
        assert_eq!(remote.effective_model_name(), "multi-qa-MiniLM-L6-cos-v1");
    }

    #[test]
    fn remote_empty_batch_needs_no_network() {
        let p = RemoteProvider::new(ProviderSpec {
            kind: ProviderKind::Remote,
            endpoint: Some("http://127.0.0.1:1/embed".into()),
            model_name: Some("m".into()),
            ..Default::default()
        })
        .unwrap();
        assert!(p.embed_batch(&[]).unwrap().is_empty());
    }

    #[test]
    fn unreachable_endpoint_is_transport_error() {
        let p = RemoteProvider::new(ProviderSpec {
            kind: ProviderKind::Remote,
            endpoint: Some("http://127.0.0.1:1/embed".into()),
            model_name: Some("m".into()),
            retries: 1,
            timeout_secs: 2,
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(p.embed_batch(&["x".into()]), Err(EmbedError::Transport(_))));
    }
}
