use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use trailrank_core::describe::{generate_description, read_descriptions, write_descriptions};
use trailrank_core::embed::{
    content_key, rank_documents, read_rankings, write_rankings, CachedEmbedder, EmbeddingCache,
    EmbeddingVector, RankedList,
};
use trailrank_core::eval::{builtin_queries, emit_plots, evaluate, read_queries, write_curves_csv, ProviderMetadata, Query};
use trailrank_core::geo::io::{read_attributes, read_layer, read_places, read_routes_file, write_attributes};
use trailrank_core::geo::{
    compute_attributes_batch, filter_route, ContextLayers, ElevationGrid, FeatureLayer, FilterOutcome, LayerClass,
};
use trailrank_core::synth::{generate_corpus_with, write_corpus, CorpusFiles};
use trailrank_core::Execution;

use crate::config::{PipelineConfig, ResolvedPaths};
use crate::error::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Synth,
    Attributes,
    Describe,
    Embed,
    Rank,
    Evaluate,
}

impl Stage {
    pub const CHAIN: [Stage; 5] = [Stage::Attributes, Stage::Describe, Stage::Embed, Stage::Rank, Stage::Evaluate];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Attributes => "attributes",
            Stage::Describe => "describe",
            Stage::Embed => "embed",
            Stage::Rank => "rank",
            Stage::Evaluate => "evaluate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Ran,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: Stage,
    pub status: StageStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub force: bool,
    pub exec: Execution,
    pub thin: bool,
}

pub struct Pipeline {
    cfg: PipelineConfig,
    paths: ResolvedPaths,
    config_file: Option<PathBuf>,
    opts: Options,
}

/// Removes the workdir lock when the run ends.
struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn mtime(p: &Path) -> Option<SystemTime> {
    std::fs::metadata(p).and_then(|m| m.modified()).ok()
}

/// Writes through a temporary sibling and renames, so a failed write never
/// leaves a fresh-looking output behind.
fn write_atomic<F>(stage: Stage, path: &Path, f: F) -> Result<(), PipelineError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), String>,
{
    let tmp = path.with_extension("partial");
    let err = |e: String| PipelineError::data(stage.name(), format!("writing {}: {e}", path.display()));
    let file = File::create(&tmp).map_err(|e| err(e.to_string()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(err)?;
    w.flush().map_err(|e| err(e.to_string()))?;
    drop(w);
    std::fs::rename(&tmp, path).map_err(|e| err(e.to_string()))
}

fn open(stage: Stage, path: &Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| PipelineError::data(stage.name(), format!("cannot open {}: {e}", path.display())))
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, paths: ResolvedPaths, config_file: Option<PathBuf>, opts: Options) -> Self {
        Self { cfg, paths, config_file, opts }
    }

    pub fn paths(&self) -> &ResolvedPaths {
        &self.paths
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    /// Stages for `all`: synth first when the config asks for it.
    pub fn all_stages(&self) -> Vec<Stage> {
        let mut v = Vec::new();
        if self.cfg.synth.is_some() {
            v.push(Stage::Synth);
        }
        v.extend(Stage::CHAIN);
        v
    }

    pub fn run(&self, stages: &[Stage]) -> Result<Vec<StageReport>, PipelineError> {
        std::fs::create_dir_all(&self.paths.workdir).map_err(|e| {
            PipelineError::data("pipeline", format!("cannot create workdir {}: {e}", self.paths.workdir.display()))
        })?;
        let lock = self.paths.lock();
        std::fs::OpenOptions::new().write(true).create_new(true).open(&lock).map_err(|e| {
            PipelineError::data(
                "pipeline",
                format!("cannot lock {} ({e}); another run may own this workdir", lock.display()),
            )
        })?;
        let _guard = LockGuard(lock);

        let mut reports = Vec::new();
        for &stage in stages {
            let r = self.run_stage(stage)?;
            match r.status {
                StageStatus::Ran => log::info!("{}: {}", stage.name(), r.detail),
                StageStatus::Skipped => log::info!("{}: skipped, outputs are up to date", stage.name()),
            }
            reports.push(r);
        }
        Ok(reports)
    }

    fn run_stage(&self, stage: Stage) -> Result<StageReport, PipelineError> {
        let (inputs, outputs) = self.io(stage);
        for i in &inputs {
            if !i.exists() {
                return Err(PipelineError::data(stage.name(), format!("missing input {}", i.display())));
            }
        }
        if self.is_fresh(&inputs, &outputs) {
            return Ok(StageReport { stage, status: StageStatus::Skipped, detail: String::new() });
        }
        let detail = match stage {
            Stage::Synth => self.synth()?,
            Stage::Attributes => self.attributes()?,
            Stage::Describe => self.describe()?,
            Stage::Embed => self.embed()?,
            Stage::Rank => self.rank()?,
            Stage::Evaluate => self.evaluate()?,
        };
        Ok(StageReport { stage, status: StageStatus::Ran, detail })
    }

    fn layer_files(&self) -> Vec<(LayerClass, PathBuf)> {
        LayerClass::ALL.iter().map(|c| (*c, self.paths.layers.join(format!("{}.geojson", c.as_str())))).collect()
    }

    /// Required inputs and produced outputs of each stage.
    fn io(&self, stage: Stage) -> (Vec<PathBuf>, Vec<PathBuf>) {
        let p = &self.paths;
        let queries: Vec<PathBuf> = p.queries.iter().cloned().collect();
        match stage {
            Stage::Synth => {
                let f = CorpusFiles::in_dir(&p.corpus);
                (vec![], vec![f.routes, f.dem, f.places, f.truth])
            }
            Stage::Attributes => {
                let mut i = vec![p.routes.clone(), p.dem.clone(), p.places.clone()];
                i.extend(self.layer_files().into_iter().map(|(_, f)| f).filter(|f| f.exists()));
                (i, vec![p.attributes(), p.rejected()])
            }
            Stage::Describe => (vec![p.attributes()], vec![p.descriptions()]),
            Stage::Embed => {
                let mut i = vec![p.descriptions()];
                i.extend(queries);
                (i, vec![p.embeddings(), p.workdir.join("embeddings.done")])
            }
            Stage::Rank => {
                let mut i = vec![p.descriptions(), p.embeddings()];
                i.extend(queries);
                (i, vec![p.rankings()])
            }
            Stage::Evaluate => {
                let mut i = vec![p.rankings(), p.attributes()];
                i.extend(queries);
                (i, vec![p.curves(), p.report()])
            }
        }
    }

    fn is_fresh(&self, inputs: &[PathBuf], outputs: &[PathBuf]) -> bool {
        if self.opts.force {
            return false;
        }
        let newest = inputs.iter().chain(self.config_file.iter()).filter_map(|p| mtime(p)).max();
        outputs.iter().all(|o| match (mtime(o), newest) {
            (Some(t), Some(n)) => t >= n,
            (Some(_), None) => true,
            (None, _) => false,
        })
    }

    fn queries(&self, stage: Stage) -> Result<Vec<Query>, PipelineError> {
        match &self.paths.queries {
            None => Ok(builtin_queries()),
            Some(path) => read_queries(open(stage, path)?)
                .map_err(|e| PipelineError::data(stage.name(), format!("{}: {e}", path.display()))),
        }
    }

    fn synth(&self) -> Result<String, PipelineError> {
        let stage = Stage::Synth;
        let spec = self
            .cfg
            .synth
            .as_ref()
            .ok_or_else(|| PipelineError::usage(stage.name(), "the config has no [synth] section"))?;
        let corpus = generate_corpus_with(spec, self.opts.exec).map_err(|e| match e {
            trailrank_core::synth::SynthError::InfeasibleSpec(_) => PipelineError::usage(stage.name(), e),
            other => PipelineError::data(stage.name(), other),
        })?;
        write_corpus(&corpus, &self.paths.corpus).map_err(|e| PipelineError::data(stage.name(), e))?;
        Ok(format!("wrote {} routes to {}", corpus.routes.len(), self.paths.corpus.display()))
    }

    fn attributes(&self) -> Result<String, PipelineError> {
        let stage = Stage::Attributes;
        let name = stage.name();
        let p = &self.paths;
        let routes = read_routes_file(&p.routes).map_err(|e| PipelineError::data(name, format!("{}: {e}", p.routes.display())))?;
        let mut seen = HashSet::new();
        if let Some(dup) = routes.iter().find(|r| !seen.insert(r.id())) {
            return Err(PipelineError::data(name, format!("route {}: duplicate id", dup.id())));
        }

        let mut layers = ContextLayers::new();
        for (class, path) in self.layer_files() {
            if path.exists() {
                let layer = read_layer(class, open(stage, &path)?)
                    .map_err(|e| PipelineError::data(name, format!("{}: {e}", path.display())))?;
                layers.insert(layer);
            } else {
                log::warn!("no {} layer at {}; treating as empty", class.as_str(), path.display());
                layers.insert(FeatureLayer::empty(class));
            }
        }
        let grid = ElevationGrid::read_esri_ascii(open(stage, &p.dem)?)
            .map_err(|e| PipelineError::data(name, format!("{}: {e}", p.dem.display())))?;
        let places = read_places(open(stage, &p.places)?)
            .map_err(|e| PipelineError::data(name, format!("{}: {e}", p.places.display())))?;

        let mut kept = Vec::with_capacity(routes.len());
        let mut rejected = Vec::new();
        for r in routes {
            match filter_route(&r) {
                FilterOutcome::Keep => kept.push(r),
                FilterOutcome::Reject(reason) => {
                    log::warn!("route {} rejected: {}", r.id(), reason.as_str());
                    rejected.push((r.id().to_string(), reason.as_str()));
                }
            }
        }

        let results = compute_attributes_batch(&kept, &layers, &grid, &places, &self.cfg.attributes, self.opts.exec);
        let mut attrs = Vec::with_capacity(kept.len());
        for (r, a) in kept.iter().zip(results) {
            attrs.push(a.map_err(|e| PipelineError::data(name, format!("route {}: {e}", r.id())))?);
        }

        write_atomic(stage, &p.rejected(), |w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["route_id", "reason"]).map_err(|e| e.to_string())?;
            for (id, why) in &rejected {
                c.write_record([id.as_str(), why]).map_err(|e| e.to_string())?;
            }
            c.flush().map_err(|e| e.to_string())
        })?;
        write_atomic(stage, &p.attributes(), |w| write_attributes(w, &attrs).map_err(|e| e.to_string()))?;
        Ok(format!("{} routes kept, {} rejected", attrs.len(), rejected.len()))
    }

    fn describe(&self) -> Result<String, PipelineError> {
        let stage = Stage::Describe;
        let cfg = &self.cfg.description;
        cfg.validate().map_err(|e| PipelineError::usage(stage.name(), e))?;
        let attrs = read_attributes(open(stage, &self.paths.attributes())?)
            .map_err(|e| PipelineError::data(stage.name(), e))?;
        let descs = self.opts.exec.map(&attrs, |a| generate_description(a, cfg));
        write_atomic(stage, &self.paths.descriptions(), |w| write_descriptions(w, &descs).map_err(|e| e.to_string()))?;
        Ok(format!("{} descriptions", descs.len()))
    }

    fn embed(&self) -> Result<String, PipelineError> {
        let stage = Stage::Embed;
        let name = stage.name();
        let stamp = self.paths.workdir.join("embeddings.done");
        let _ = std::fs::remove_file(&stamp);
        let descs = read_descriptions(open(stage, &self.paths.descriptions())?).map_err(|e| PipelineError::data(name, e))?;
        let queries = self.queries(stage)?;
        let spec = &self.cfg.provider;
        let provider = spec.build().map_err(|e| PipelineError::embed(name, e))?;
        let cache = EmbeddingCache::open(&self.paths.embeddings()).map_err(|e| PipelineError::embed(name, e))?;
        let before = cache.len();
        let texts: Vec<String> =
            descs.iter().map(|d| d.text.clone()).chain(queries.iter().map(|q| q.text.clone())).collect();
        CachedEmbedder::new(provider.as_ref(), &cache)
            .batch_size(spec.batch_size)
            .max_tokens(spec.max_tokens)
            .execution(self.opts.exec)
            .embed(&texts)
            .map_err(|e| PipelineError::embed(name, e))?;
        cache.flush().map_err(|e| PipelineError::embed(name, e))?;
        let added = cache.len() - before;
        drop(cache);
        std::fs::write(&stamp, format!("{}\n", provider.model_name()))
            .map_err(|e| PipelineError::data(name, e))?;
        Ok(format!("{} texts, {added} newly embedded with {}", texts.len(), provider.model_name()))
    }

    fn rank(&self) -> Result<String, PipelineError> {
        let stage = Stage::Rank;
        let name = stage.name();
        let descs = read_descriptions(open(stage, &self.paths.descriptions())?).map_err(|e| PipelineError::data(name, e))?;
        let queries = self.queries(stage)?;
        let model = self.cfg.provider.effective_model_name();
        let cache = EmbeddingCache::open(&self.paths.embeddings()).map_err(|e| PipelineError::embed(name, e))?;
        let lookup = |text: &str, what: &str| -> Result<EmbeddingVector, PipelineError> {
            cache.get(&content_key(&model, text)).ok_or_else(|| {
                PipelineError::data(name, format!("{what}: no cached embedding for model {model}; run embed first"))
            })
        };
        let docs = descs
            .iter()
            .map(|d| Ok((d.route_id.clone(), lookup(&d.text, &format!("route {}", d.route_id))?)))
            .collect::<Result<Vec<_>, PipelineError>>()?;
        let mut lists = Vec::with_capacity(queries.len());
        for q in &queries {
            let v = lookup(&q.text, &format!("query {}", q.id))?;
            lists.push(rank_documents(&q.id, &v, &docs, self.opts.exec).map_err(|e| PipelineError::embed(name, e))?);
        }
        write_atomic(stage, &self.paths.rankings(), |w| write_rankings(w, &lists).map_err(|e| e.to_string()))?;
        Ok(format!("{} queries over {} documents", lists.len(), docs.len()))
    }

    fn evaluate(&self) -> Result<String, PipelineError> {
        let stage = Stage::Evaluate;
        let name = stage.name();
        let p = &self.paths;
        let queries = self.queries(stage)?;
        let rankings: HashMap<String, RankedList> = read_rankings(open(stage, &p.rankings())?)
            .map_err(|e| PipelineError::data(name, e))?
            .into_iter()
            .map(|l| (l.query_id.clone(), l))
            .collect();
        let attrs = read_attributes(open(stage, &p.attributes())?)
            .map_err(|e| PipelineError::data(name, e))?
            .into_iter()
            .map(|a| (a.route_id.clone(), a))
            .collect();
        let spec = &self.cfg.provider;
        let report = evaluate(&rankings, &attrs, &queries, self.opts.exec)
            .map_err(|e| PipelineError::data(name, e))?
            .with_provider(ProviderMetadata { model_name: spec.effective_model_name(), dimension: spec.dimension });

        let thin = (self.opts.thin || self.cfg.evaluate.thin).then_some(self.cfg.evaluate.max_rows);
        write_atomic(stage, &p.curves(), |w| write_curves_csv(&report, thin, w).map_err(|e| e.to_string()))?;
        let plots = p.plots();
        if plots.exists() {
            std::fs::remove_dir_all(&plots).map_err(|e| PipelineError::data(name, e))?;
        }
        std::fs::create_dir_all(&plots).map_err(|e| PipelineError::data(name, e))?;
        let written = emit_plots(&report, &plots).map_err(|e| PipelineError::data(name, e))?;
        write_atomic(stage, &p.report(), |w| {
            serde_json::to_writer_pretty(&mut *w, &report.digest()).map_err(|e| e.to_string())?;
            w.write_all(b"\n").map_err(|e| e.to_string())
        })?;
        Ok(format!("{} curves, {} plots", report.curves.len(), written.len()))
    }
}
