//! Baseline per-dimension scorers behind a pluggable interface.
//!
//! These are simple, deterministic heuristics standing in for a trained
//! feature pipeline: each produces one raw score per document for its
//! dimension. Pre-scored session logs bypass this module entirely, so any
//! external scoring stack can feed the same pipeline.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dimension::{DimensionId, DIMENSION_COUNT};
use crate::error::{Error, Result};
use crate::scores::ScoreMatrix;

/// Retrieved-document metadata consumed by the baseline scorers.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub url_host: String,
    pub title: String,
    /// Body text; empty when the log carries only metadata.
    pub body_text: String,
    pub length_tokens: u64,
    /// Mean sentence length in tokens, used by the readability baseline.
    pub sentence_avg_len: f64,
    /// Recency ordinal, 0 = newest.
    pub publish_rank: u64,
}

/// Per-user signals consumed by the Habit, Interest and Reliability
/// baselines. All counts and term weights are non-negative.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    #[serde(default)]
    pub host_click_counts: BTreeMap<String, u64>,
    #[serde(default)]
    pub interest_terms: BTreeMap<String, f64>,
    #[serde(default)]
    pub trusted_hosts: BTreeSet<String>,
}

impl UserProfile {
    fn clicks(&self, host: &str) -> u64 {
        self.host_click_counts.get(host).copied().unwrap_or(0)
    }
}

/// Produces one raw score per document for a single dimension.
///
/// Implementations must be deterministic and return a finite score per
/// document; [`build_score_matrix`] enforces the finiteness contract.
pub trait DimensionScorer: Send + Sync {
    fn score(
        &self,
        query_terms: &[String],
        docs: &[DocumentRecord],
        profile: &UserProfile,
    ) -> Vec<f64>;
}

/// Lowercase alphanumeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

fn term_counts(tokens: &[String]) -> BTreeMap<&str, f64> {
    let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    counts
}

/// Topicality baseline: `0.5 · tf-idf cosine + 0.5 · BM25` over body text.
///
/// Corpus statistics (document frequency, average length) are computed over
/// the query's retrieved set. The tf-idf weight is `count · (ln((n+1)/(df+1)) + 1)`
/// and the BM25 idf is `ln(1 + (n - df + 0.5)/(df + 0.5))`, both of which
/// stay non-negative on tiny corpora.
pub struct Bm25TfidfScorer {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25TfidfScorer {
    fn default() -> Self {
        Bm25TfidfScorer { k1: 1.2, b: 0.75 }
    }
}

impl DimensionScorer for Bm25TfidfScorer {
    fn score(
        &self,
        query_terms: &[String],
        docs: &[DocumentRecord],
        _profile: &UserProfile,
    ) -> Vec<f64> {
        let doc_tokens: Vec<Vec<String>> = docs.iter().map(|d| tokenize(&d.body_text)).collect();
        let doc_counts: Vec<BTreeMap<&str, f64>> =
            doc_tokens.iter().map(|t| term_counts(t)).collect();
        let n = docs.len() as f64;

        let mut df: BTreeMap<&str, f64> = BTreeMap::new();
        for counts in &doc_counts {
            for term in counts.keys() {
                *df.entry(term).or_insert(0.0) += 1.0;
            }
        }
        let tfidf_idf = |term: &str| -> f64 {
            let d = df.get(term).copied().unwrap_or(0.0);
            ((n + 1.0) / (d + 1.0)).ln() + 1.0
        };
        let bm25_idf = |term: &str| -> f64 {
            let d = df.get(term).copied().unwrap_or(0.0);
            (1.0 + (n - d + 0.5) / (d + 0.5)).ln()
        };

        let query_counts = term_counts(query_terms);
        let query_norm = query_counts
            .iter()
            .map(|(t, c)| (c * tfidf_idf(t)).powi(2))
            .sum::<f64>()
            .sqrt();
        let total_len: f64 = doc_tokens.iter().map(|t| t.len() as f64).sum();
        let avgdl = total_len / n;

        docs.iter()
            .enumerate()
            .map(|(i, _)| {
                let counts = &doc_counts[i];
                let doc_len = doc_tokens[i].len() as f64;

                let doc_norm = counts
                    .iter()
                    .map(|(t, c)| (c * tfidf_idf(t)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let mut dot = 0.0;
                let mut bm25 = 0.0;
                for (term, q_count) in &query_counts {
                    let tf = counts.get(term).copied().unwrap_or(0.0);
                    if tf == 0.0 {
                        continue;
                    }
                    dot += (q_count * tfidf_idf(term)) * (tf * tfidf_idf(term));
                    if avgdl > 0.0 {
                        let tf_component = (tf * (self.k1 + 1.0))
                            / (tf + self.k1 * (1.0 - self.b + self.b * doc_len / avgdl));
                        bm25 += bm25_idf(term) * tf_component;
                    }
                }
                let cosine = if query_norm > 0.0 && doc_norm > 0.0 {
                    dot / (query_norm * doc_norm)
                } else {
                    0.0
                };
                0.5 * cosine + 0.5 * bm25
            })
            .collect()
    }
}

/// Habit baseline: `ln(1 + clicks on the document's host)`.
pub struct HostClickScorer;

impl DimensionScorer for HostClickScorer {
    fn score(&self, _: &[String], docs: &[DocumentRecord], profile: &UserProfile) -> Vec<f64> {
        docs.iter()
            .map(|d| (1.0 + profile.clicks(&d.url_host) as f64).ln())
            .collect()
    }
}

/// Interest baseline: cosine between body term counts and the profile's
/// weighted interest terms.
pub struct InterestCosineScorer;

impl DimensionScorer for InterestCosineScorer {
    fn score(&self, _: &[String], docs: &[DocumentRecord], profile: &UserProfile) -> Vec<f64> {
        let profile_norm = profile
            .interest_terms
            .values()
            .map(|w| w * w)
            .sum::<f64>()
            .sqrt();
        docs.iter()
            .map(|d| {
                if profile_norm == 0.0 {
                    return 0.0;
                }
                let tokens = tokenize(&d.body_text);
                let counts = term_counts(&tokens);
                let doc_norm = counts.values().map(|c| c * c).sum::<f64>().sqrt();
                if doc_norm == 0.0 {
                    return 0.0;
                }
                let dot: f64 = counts
                    .iter()
                    .filter_map(|(t, c)| profile.interest_terms.get(*t).map(|w| c * w))
                    .sum();
                dot / (doc_norm * profile_norm)
            })
            .collect()
    }
}

/// Novelty baseline: `1 / (1 + publish_rank)`, newest documents first.
pub struct RecencyScorer;

impl DimensionScorer for RecencyScorer {
    fn score(&self, _: &[String], docs: &[DocumentRecord], _: &UserProfile) -> Vec<f64> {
        docs.iter()
            .map(|d| 1.0 / (1.0 + d.publish_rank as f64))
            .collect()
    }
}

/// Reliability baseline: 1 for trusted hosts, plus a small click-history
/// tiebreak of `0.1 · ln(1 + clicks)`.
pub struct TrustedHostScorer;

impl DimensionScorer for TrustedHostScorer {
    fn score(&self, _: &[String], docs: &[DocumentRecord], profile: &UserProfile) -> Vec<f64> {
        docs.iter()
            .map(|d| {
                let trusted = if profile.trusted_hosts.contains(&d.url_host) {
                    1.0
                } else {
                    0.0
                };
                trusted + 0.1 * (1.0 + profile.clicks(&d.url_host) as f64).ln()
            })
            .collect()
    }
}

/// Scope baseline: `min(1, length_tokens / 1000)` — longer documents cover
/// more ground, saturating at 1000 tokens.
pub struct DocLengthScorer;

impl DimensionScorer for DocLengthScorer {
    fn score(&self, _: &[String], docs: &[DocumentRecord], _: &UserProfile) -> Vec<f64> {
        docs.iter()
            .map(|d| (d.length_tokens as f64 / 1000.0).min(1.0))
            .collect()
    }
}

/// Understandability baseline: `1 / (1 + avg sentence length / 10)`, an
/// inverse reading-grade proxy.
pub struct ReadabilityScorer;

impl DimensionScorer for ReadabilityScorer {
    fn score(&self, _: &[String], docs: &[DocumentRecord], _: &UserProfile) -> Vec<f64> {
        docs.iter()
            .map(|d| 1.0 / (1.0 + d.sentence_avg_len / 10.0))
            .collect()
    }
}

/// Scorer registry keyed by dimension. All seven dimensions must be filled
/// before [`build_score_matrix`] will run.
pub struct ScorerSet {
    scorers: BTreeMap<DimensionId, Box<dyn DimensionScorer>>,
}

impl ScorerSet {
    pub fn empty() -> Self {
        ScorerSet {
            scorers: BTreeMap::new(),
        }
    }

    /// The canonical baseline assignment for every dimension.
    pub fn baselines() -> Self {
        let mut set = ScorerSet::empty();
        for dim in DimensionId::ALL {
            set.set(dim, baseline_for(dim));
        }
        set
    }

    pub fn set(&mut self, dim: DimensionId, scorer: Box<dyn DimensionScorer>) {
        self.scorers.insert(dim, scorer);
    }

    pub fn get(&self, dim: DimensionId) -> Option<&dyn DimensionScorer> {
        self.scorers.get(&dim).map(|b| b.as_ref())
    }
}

impl Default for ScorerSet {
    fn default() -> Self {
        ScorerSet::baselines()
    }
}

fn baseline_for(dim: DimensionId) -> Box<dyn DimensionScorer> {
    match dim {
        DimensionId::Habit => Box::new(HostClickScorer),
        DimensionId::Interest => Box::new(InterestCosineScorer),
        DimensionId::Novelty => Box::new(RecencyScorer),
        DimensionId::Reliability => Box::new(TrustedHostScorer),
        DimensionId::Scope => Box::new(DocLengthScorer),
        DimensionId::Topicality => Box::new(Bm25TfidfScorer::default()),
        DimensionId::Understandability => Box::new(ReadabilityScorer),
    }
}

/// Look up a scorer by its registry name.
pub fn scorer_by_name(name: &str) -> Result<Box<dyn DimensionScorer>> {
    match name {
        "bm25-tfidf" => Ok(Box::new(Bm25TfidfScorer::default())),
        "host-clicks" => Ok(Box::new(HostClickScorer)),
        "interest-cosine" => Ok(Box::new(InterestCosineScorer)),
        "recency" => Ok(Box::new(RecencyScorer)),
        "trusted-host" => Ok(Box::new(TrustedHostScorer)),
        "doc-length" => Ok(Box::new(DocLengthScorer)),
        "readability" => Ok(Box::new(ReadabilityScorer)),
        other => Err(Error::config(format!(
            "unknown scorer '{other}' (known: bm25-tfidf, host-clicks, interest-cosine, \
             recency, trusted-host, doc-length, readability)"
        ))),
    }
}

/// Scorer configuration file: an optional user profile plus optional
/// per-dimension scorer overrides by registry name.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScorerConfig {
    #[serde(default)]
    pub profile: UserProfile,
    #[serde(default)]
    pub scorers: BTreeMap<DimensionId, String>,
}

impl ScorerConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ScorerConfig = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("bad scorer config: {e}")))?;
        for (term, weight) in &config.profile.interest_terms {
            if !weight.is_finite() || *weight < 0.0 {
                return Err(Error::config(format!(
                    "interest term '{term}' has weight {weight}; weights must be finite and \
                     non-negative"
                )));
            }
        }
        Ok(config)
    }

    /// Baselines with this config's overrides applied.
    pub fn build_scorer_set(&self) -> Result<ScorerSet> {
        let mut set = ScorerSet::baselines();
        for (dim, name) in &self.scorers {
            set.set(*dim, scorer_by_name(name)?);
        }
        Ok(set)
    }
}

/// Run every dimension's scorer and assemble the raw n×7 matrix, columns in
/// [`DimensionId::ALL`] order.
pub fn build_score_matrix(
    query_id: &str,
    query_terms: &[String],
    docs: &[DocumentRecord],
    profile: &UserProfile,
    scorers: &ScorerSet,
) -> Result<ScoreMatrix> {
    if docs.is_empty() {
        return Err(Error::invalid(format!(
            "query '{query_id}' has no documents to score"
        )));
    }
    let mut rows = vec![[0.0f64; DIMENSION_COUNT]; docs.len()];
    for dim in DimensionId::ALL {
        let scorer = scorers
            .get(dim)
            .ok_or_else(|| Error::config(format!("no scorer registered for dimension '{dim}'")))?;
        let column = scorer.score(query_terms, docs, profile);
        if column.len() != docs.len() {
            return Err(Error::config(format!(
                "scorer for dimension '{dim}' returned {} scores for {} documents",
                column.len(),
                docs.len()
            )));
        }
        for (i, v) in column.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::config(format!(
                    "scorer for dimension '{dim}' returned a non-finite score for doc '{}'",
                    docs[i].doc_id
                )));
            }
            rows[i][dim.index()] = v;
        }
    }
    let doc_ids = docs.iter().map(|d| d.doc_id.clone()).collect();
    ScoreMatrix::new(query_id, doc_ids, rows)
}
