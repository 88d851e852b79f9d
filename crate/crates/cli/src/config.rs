use std::path::{Path, PathBuf};

use serde::Deserialize;
use trailrank_core::describe::DescriptionConfig;
use trailrank_core::embed::ProviderSpec;
use trailrank_core::geo::AttributeParams;
use trailrank_core::synth::SynthSpec;

pub const WORKDIR_ENV: &str = "TRAILRANK_WORKDIR";

/// Input locations. `corpus` names a directory laid out the way the `synth`
/// stage writes it; the individual entries override single files.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub routes: Option<PathBuf>,
    pub layers: Option<PathBuf>,
    pub dem: Option<PathBuf>,
    pub places: Option<PathBuf>,
    pub workdir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    /// CSV with `text,attributes` columns replacing the built-in queries.
    pub queries: Option<PathBuf>,
    pub thin: bool,
    pub max_rows: usize,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self { queries: None, thin: false, max_rows: 4096 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub provider: ProviderSpec,
    pub description: DescriptionConfig,
    pub attributes: AttributeParams,
    pub evaluate: EvaluateConfig,
    pub synth: Option<SynthSpec>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Every path the pipeline touches, made absolute against the config
/// file's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPaths {
    pub corpus: PathBuf,
    pub routes: PathBuf,
    pub layers: PathBuf,
    pub dem: PathBuf,
    pub places: PathBuf,
    pub queries: Option<PathBuf>,
    pub workdir: PathBuf,
}

impl ResolvedPaths {
    pub fn resolve(cfg: &PipelineConfig, base: &Path, workdir_env: Option<PathBuf>) -> Self {
        let abs = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        let workdir = workdir_env
            .map(|p| abs(&p))
            .or_else(|| cfg.paths.workdir.as_deref().map(abs))
            .unwrap_or_else(|| base.join("work"));
        let corpus = cfg.paths.corpus.as_deref().map(abs).unwrap_or_else(|| workdir.join("corpus"));
        let pick = |o: &Option<PathBuf>, default: &str| o.as_deref().map(abs).unwrap_or_else(|| corpus.join(default));
        Self {
            routes: pick(&cfg.paths.routes, "routes.geojsonl"),
            layers: pick(&cfg.paths.layers, "layers"),
            dem: pick(&cfg.paths.dem, "dem.asc"),
            places: pick(&cfg.paths.places, "places.csv"),
            queries: cfg.evaluate.queries.as_deref().map(abs),
            corpus,
            workdir,
        }
    }

    pub fn attributes(&self) -> PathBuf {
        self.workdir.join("attributes.csv")
    }
    pub fn rejected(&self) -> PathBuf {
        self.workdir.join("rejected.csv")
    }
    pub fn descriptions(&self) -> PathBuf {
        self.workdir.join("descriptions.jsonl")
    }
    pub fn embeddings(&self) -> PathBuf {
        self.workdir.join("embeddings.trv")
    }
    pub fn rankings(&self) -> PathBuf {
        self.workdir.join("rankings.csv")
    }
    pub fn curves(&self) -> PathBuf {
        self.workdir.join("curves.csv")
    }
    pub fn plots(&self) -> PathBuf {
        self.workdir.join("plots")
    }
    pub fn report(&self) -> PathBuf {
        self.workdir.join("report.json")
    }
    pub fn lock(&self) -> PathBuf {
        self.workdir.join(".trailrank.lock")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let cfg = PipelineConfig::parse(
            r#"
            [paths]
            corpus = "data"
            dem = "/abs/dem.asc"

            [provider]
            kind = "remote"
            endpoint = "http://localhost:9/embed"
            dimension = 384

            [description]
            seed = 7

            [evaluate]
            thin = true

            [synth]
            n_routes = 50
            "#,
        )
        .unwrap();
        assert_eq!(cfg.description.seed, 7);
        assert_eq!(cfg.description.mention_threshold, 5.0);
        assert_eq!(cfg.provider.dimension, 384);
        assert_eq!(cfg.synth.as_ref().unwrap().n_routes, 50);
        assert!(cfg.evaluate.thin);

        let p = ResolvedPaths::resolve(&cfg, Path::new("/base"), None);
        assert_eq!(p.routes, Path::new("/base/data/routes.geojsonl"));
        assert_eq!(p.dem, Path::new("/abs/dem.asc"));
        assert_eq!(p.workdir, Path::new("/base/work"));
        let p = ResolvedPaths::resolve(&cfg, Path::new("/base"), Some("/tmp/w".into()));
        assert_eq!(p.workdir, Path::new("/tmp/w"));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(PipelineConfig::parse("[paths]\nroute = \"x\"\n").is_err());
        assert!(PipelineConfig::parse("").is_ok());
    }
}
