//! Cumulative-mean evaluation of full rankings.
//!
//! For each query and each attribute it cares about, the attribute is read
//! down the ranking and averaged over the top k documents for every k. A
//! good ranking for "a long walk" starts high on `length_m` and decays
//! towards the corpus mean.

mod plot;
mod queries;

pub use plot::{render_svg, PlotLayout};
pub use queries::{builtin_queries, read_queries, Query};

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::RankedList;
use crate::geo::{AttributeName, RouteAttributes};
use crate::Execution;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot average an empty list")]
    EmptyInput,
    #[error("no attributes for ranked route {0:?}")]
    MissingAttributes(String),
    #[error("no ranking for query {0:?}")]
    MissingRanking(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Running mean `c_k = c_{k-1} + (v_k - c_{k-1}) / k`.
pub fn cumulative_mean(values: &[f64]) -> Result<Vec<f64>, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut out = Vec::with_capacity(values.len());
    let mut c = 0.0;
    for (i, v) in values.iter().enumerate() {
        c += (v - c) / (i + 1) as f64;
        out.push(c);
    }
    Ok(out)
}

/// `values[k-1]` is the mean of `attribute` over the top k documents.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve {
    pub query_id: String,
    pub query_text: String,
    pub attribute: AttributeName,
    pub values: Vec<f64>,
}

impl CumulativeCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean over the top `k` (clamped to the curve length).
    pub fn at(&self, k: usize) -> Option<f64> {
        if k == 0 {
            return None;
        }
        self.values.get(k.min(self.values.len()) - 1).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n_routes: usize,
    pub attributes: BTreeMap<String, AttributeSummary>,
}

impl CorpusSummary {
    pub fn from_attributes<'a, I>(attrs: I) -> Self
    where
        I: IntoIterator<Item = &'a RouteAttributes>,
    {
        let mut acc: Vec<(f64, f64, f64)> = vec![(0.0, f64::INFINITY, f64::NEG_INFINITY); AttributeName::ALL.len()];
        let mut n = 0usize;
        for a in attrs {
            n += 1;
            for (slot, name) in acc.iter_mut().zip(AttributeName::ALL) {
                let v = a.value(name);
                slot.0 += (v - slot.0) / n as f64;
                slot.1 = slot.1.min(v);
                slot.2 = slot.2.max(v);
            }
        }
        let attributes = if n == 0 {
            BTreeMap::new()
        } else {
            AttributeName::ALL
                .iter()
                .zip(acc)
                .map(|(name, (mean, min, max))| (name.as_str().to_string(), AttributeSummary { mean, min, max }))
                .collect()
        };
        Self { n_routes: n, attributes }
    }

    pub fn get(&self, name: AttributeName) -> Option<&AttributeSummary> {
        self.attributes.get(name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderMetadata {
    pub model_name: String,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub curves: Vec<CumulativeCurve>,
    pub summary: CorpusSummary,
    pub provider: Option<ProviderMetadata>,
}

/// Compact per-curve digest for the JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveDigest {
    pub query_id: String,
    pub query: String,
    pub attribute: String,
    pub n: usize,
    pub top_1: f64,
    pub top_10: f64,
    pub top_100: f64,
    pub top_1000: f64,
    pub corpus_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDigest {
    pub provider: Option<ProviderMetadata>,
    pub summary: CorpusSummary,
    pub curves: Vec<CurveDigest>,
}

impl EvaluationReport {
    pub fn with_provider(mut self, provider: ProviderMetadata) -> Self {
        self.provider = Some(provider);
        self
    }

    pub fn curve(&self, query_id: &str, attribute: AttributeName) -> Option<&CumulativeCurve> {
        self.curves.iter().find(|c| c.query_id == query_id && c.attribute == attribute)
    }

    /// Curves grouped by attribute, in first-appearance order within each.
    pub fn by_attribute(&self) -> BTreeMap<AttributeName, Vec<&CumulativeCurve>> {
        let mut out: BTreeMap<AttributeName, Vec<&CumulativeCurve>> = BTreeMap::new();
        for c in &self.curves {
            out.entry(c.attribute).or_default().push(c);
        }
        out
    }

    pub fn digest(&self) -> ReportDigest {
        let curves = self
            .curves
            .iter()
            .map(|c| CurveDigest {
                query_id: c.query_id.clone(),
                query: c.query_text.clone(),
                attribute: c.attribute.as_str().to_string(),
                n: c.len(),
                top_1: c.at(1).unwrap_or(f64::NAN),
                top_10: c.at(10).unwrap_or(f64::NAN),
                top_100: c.at(100).unwrap_or(f64::NAN),
                top_1000: c.at(1000).unwrap_or(f64::NAN),
                corpus_mean: c.values.last().copied().unwrap_or(f64::NAN),
            })
            .collect();
        ReportDigest { provider: self.provider.clone(), summary: self.summary.clone(), curves }
    }
}

/// Builds one curve per (query, relevant attribute) pair, in query order.
pub fn evaluate(
    rankings: &HashMap<String, RankedList>,
    attrs: &HashMap<String, RouteAttributes>,
    queries: &[Query],
    exec: Execution,
) -> Result<EvaluationReport, EvalError> {
    let mut pairs = Vec::new();
    for q in queries {
        let ranking = rankings.get(&q.id).ok_or_else(|| EvalError::MissingRanking(q.id.clone()))?;
        for &a in &q.relevant_attributes {
            pairs.push((q, ranking, a));
        }
    }

    // Resolve every ranked id once per distinct ranking.
    let mut resolved: HashMap<&str, Vec<&RouteAttributes>> = HashMap::new();
    for (q, ranking, _) in &pairs {
        if resolved.contains_key(q.id.as_str()) {
            continue;
        }
        let rows = ranking
            .route_ids()
            .map(|id| attrs.get(id).ok_or_else(|| EvalError::MissingAttributes(id.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        resolved.insert(q.id.as_str(), rows);
    }

    let curves = exec
        .map(&pairs, |(q, _, a)| {
            let values: Vec<f64> = resolved[q.id.as_str()].iter().map(|r| r.value(*a)).collect();
            cumulative_mean(&values).map(|values| CumulativeCurve {
                query_id: q.id.clone(),
                query_text: q.text.clone(),
                attribute: *a,
                values,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    Ok(EvaluationReport { curves, summary: CorpusSummary::from_attributes(attrs.values()), provider: None })
}

/// Up to `max_rows` ranks spread evenly in log space, always including 1 and
/// `n`. Returns every rank when `n <= max_rows`.
pub fn log_spaced_ranks(n: usize, max_rows: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    if n <= max_rows || max_rows < 2 {
        return (1..=n).collect();
    }
    let ln = (n as f64).ln();
    let mut out: Vec<usize> = (0..max_rows)
        .map(|i| {
            let t = i as f64 / (max_rows - 1) as f64;
            ((t * ln).exp().round() as usize).clamp(1, n)
        })
        .collect();
    out.dedup();
    if *out.last().unwrap() != n {
        out.push(n);
    }
    out
}

pub const CSV_HEADER: [&str; 4] = ["query_id", "attribute", "k", "cumulative_mean"];

/// Writes `query_id,attribute,k,cumulative_mean` rows. With `thin`, each
/// curve is reduced to at most that many log-spaced ranks.
pub fn write_curves_csv<W: Write>(report: &EvaluationReport, thin: Option<usize>, writer: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for c in &report.curves {
        let ranks = match thin {
            Some(m) => log_spaced_ranks(c.len(), m),
            None => (1..=c.len()).collect(),
        };
        for k in ranks {
            w.write_record([
                c.query_id.as_str(),
                c.attribute.as_str(),
                &k.to_string(),
                &c.values[k - 1].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &EvaluationReport, thin: Option<usize>, path: &Path) -> Result<(), EvalError> {
    let file = BufWriter::new(File::create(path)?);
    write_curves_csv(report, thin, file)
}

#[derive(Debug, Deserialize)]
struct CurveRow {
    query_id: String,
    attribute: String,
    k: usize,
    cumulative_mean: f64,
}

/// Reads a curves CSV back as `(query_id, attribute) -> [(k, value)]`.
pub fn read_curves_csv<R: Read>(
    reader: R,
) -> Result<BTreeMap<(String, AttributeName), Vec<(usize, f64)>>, EvalError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out: BTreeMap<(String, AttributeName), Vec<(usize, f64)>> = BTreeMap::new();
    for row in rdr.deserialize::<CurveRow>() {
        let row = row?;
        let a = AttributeName::parse(&row.attribute)
            .ok_or_else(|| EvalError::UnknownAttribute(row.attribute.clone()))?;
        out.entry((row.query_id, a)).or_default().push((row.k, row.cumulative_mean));
    }
    Ok(out)
}

/// Writes one `<attribute>.svg` per attribute into `dir`.
pub fn emit_plots(report: &EvaluationReport, dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    let mut paths = Vec::new();
    for (attr, curves) in report.by_attribute() {
        let path = dir.join(format!("{}.svg", attr.as_str()));
        emit_plot(&curves, attr.as_str(), &path)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn emit_plot(curves: &[&CumulativeCurve], y_label: &str, path: &Path) -> Result<(), EvalError> {
    if curves.iter().any(|c| c.is_empty()) {
        return Err(EvalError::EmptyInput);
    }
    std::fs::write(path, render_svg(curves, y_label, &PlotLayout::default()))?;
    Ok(())
}
