//! NDCG metrics and multi-strategy evaluation reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::dimension::DimensionId;
use crate::error::{Error, Result};
use crate::replay::{replay, Protocol, QueryRanking, RankMode};
use crate::rerank::RankedList;
use crate::session::{ResolvedQuery, ResolvedSession};

/// Graded relevance labels for one query's documents; absent docs grade 0.
///
/// When a log carries explicit grades they are used as-is; otherwise each
/// SAT click counts as grade 1. Grades of 1 and above count as relevant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceLabels {
    query_id: String,
    labels: BTreeMap<String, u32>,
}

impl RelevanceLabels {
    pub fn new(query_id: impl Into<String>, labels: BTreeMap<String, u32>) -> Self {
        RelevanceLabels {
            query_id: query_id.into(),
            labels,
        }
    }

    /// Grade 1 for every SAT-clicked document.
    pub fn from_sat_clicks<'a>(
        query_id: impl Into<String>,
        sat_doc_ids: impl IntoIterator<Item = &'a String>,
    ) -> Self {
        RelevanceLabels {
            query_id: query_id.into(),
            labels: sat_doc_ids.into_iter().map(|id| (id.clone(), 1)).collect(),
        }
    }

    /// Labels for a resolved query: explicit grades when present, otherwise
    /// SAT clicks at grade 1.
    pub fn for_query(query: &ResolvedQuery) -> Self {
        match &query.grades {
            Some(grades) => RelevanceLabels::new(query.query_id.clone(), grades.clone()),
            None => {
                RelevanceLabels::from_sat_clicks(query.query_id.clone(), &query.sat.sat_doc_ids)
            }
        }
    }

    pub fn grade(&self, doc_id: &str) -> u32 {
        self.labels.get(doc_id).copied().unwrap_or(0)
    }

    /// Whether any document has grade 1 or above.
    pub fn has_relevant(&self) -> bool {
        self.labels.values().any(|g| *g >= 1)
    }
}

/// Ranking cutoff: a fixed depth or the whole list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    At(usize),
    All,
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::At(k) => write!(f, "{k}"),
            Cutoff::All => f.write_str("all"),
        }
    }
}

impl FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "all" {
            return Ok(Cutoff::All);
        }
        lower
            .parse::<usize>()
            .ok()
            .filter(|k| *k >= 1)
            .map(Cutoff::At)
            .ok_or_else(|| {
                Error::config(format!("bad cutoff '{s}' (expected a depth ≥ 1 or 'all')"))
            })
    }
}

/// The standard report cutoffs: 1, 5, 10 and the full list.
pub fn default_cutoffs() -> Vec<Cutoff> {
    vec![Cutoff::At(1), Cutoff::At(5), Cutoff::At(10), Cutoff::All]
}

fn gain(grade: u32) -> f64 {
    (2.0f64).powi(grade as i32) - 1.0
}

fn dcg(grades_in_rank_order: &[u32], depth: usize) -> f64 {
    grades_in_rank_order
        .iter()
        .take(depth)
        .enumerate()
        .map(|(i, &g)| gain(g) / ((i + 2) as f64).log2())
        .sum()
}

/// NDCG with exponential gain `2^grade − 1` and `log2(rank + 1)` discount.
///
/// The ideal ordering is the ranked documents' own grades sorted descending,
/// truncated at the same depth. Queries with no relevant documents score 0
/// by convention and stay in reported means.
pub fn ndcg_at(ranking: &RankedList, labels: &RelevanceLabels, cutoff: Cutoff) -> Result<f64> {
    let n = ranking.len();
    let depth = match cutoff {
        Cutoff::At(0) => return Err(Error::invalid("NDCG cutoff must be at least 1")),
        Cutoff::At(k) => k.min(n),
        Cutoff::All => n,
    };
    let grades: Vec<u32> = ranking.doc_ids().map(|id| labels.grade(id)).collect();
    let mut ideal = grades.clone();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(&ideal, depth);
    if idcg == 0.0 {
        return Ok(0.0);
    }
    Ok(dcg(&grades, depth) / idcg)
}

/// Per-query NDCG values for one strategy, parallel to the report cutoffs.
#[derive(Debug, Clone)]
pub struct PerQueryScore {
    pub session_id: String,
    pub query_id: String,
    pub ndcg: Vec<f64>,
}

/// One strategy's aggregate results.
#[derive(Debug, Clone)]
pub struct StrategyResult {
    pub mode: RankMode,
    pub label: String,
    /// Mean NDCG per cutoff over all evaluated queries.
    pub mean_ndcg: Vec<f64>,
    pub n_queries: usize,
    /// Queries counted with NDCG 0 because nothing relevant was labeled.
    pub zero_relevant: usize,
    pub per_query: Vec<PerQueryScore>,
}

/// Comparative evaluation across ranking strategies.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub cutoffs: Vec<Cutoff>,
    pub strategies: Vec<StrategyResult>,
}

impl EvalReport {
    /// CSV with one row per strategy: `strategy,ndcg@…,…,n_queries`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy");
        for c in &self.cutoffs {
            out.push_str(&format!(",ndcg@{c}"));
        }
        out.push_str(",n_queries\n");
        for s in &self.strategies {
            out.push_str(&s.label);
            for v in &s.mean_ndcg {
                out.push_str(&format!(",{v:.4}"));
            }
            out.push_str(&format!(",{}\n", s.n_queries));
        }
        out
    }

    /// Fixed-width table for terminal output.
    pub fn to_table(&self) -> String {
        let label_width = self
            .strategies
            .iter()
            .map(|s| s.label.len())
            .max()
            .unwrap_or(8)
            .max("strategy".len());
        let mut out = format!("{:<label_width$}", "strategy");
        for c in &self.cutoffs {
            out.push_str(&format!("  {:>9}", format!("ndcg@{c}")));
        }
        out.push_str("  n_queries\n");
        for s in &self.strategies {
            out.push_str(&format!("{:<label_width$}", s.label));
            for v in &s.mean_ndcg {
                out.push_str(&format!("  {v:>9.4}"));
            }
            out.push_str(&format!("  {:>9}\n", s.n_queries));
        }
        out
    }
}

/// The standard comparison set: each dimension alone, then the captured
/// weighted combination.
pub fn default_strategies() -> Vec<RankMode> {
    let mut modes: Vec<RankMode> = DimensionId::ALL.into_iter().map(RankMode::Fixed).collect();
    modes.push(RankMode::Captured);
    modes
}

/// Replay every strategy over the sessions and average NDCG at each cutoff
/// over all evaluated (informed) queries.
pub fn evaluate_strategies(
    sessions: &[ResolvedSession],
    strategies: &[RankMode],
    protocol: Protocol,
    cutoffs: &[Cutoff],
) -> Result<EvalReport> {
    if strategies.is_empty() {
        return Err(Error::invalid("no strategies to evaluate"));
    }
    if cutoffs.is_empty() || cutoffs.contains(&Cutoff::At(0)) {
        return Err(Error::invalid("cutoffs must be non-empty depths ≥ 1"));
    }
    let mut lookup: BTreeMap<(&str, &str), &ResolvedQuery> = BTreeMap::new();
    for session in sessions {
        for q in &session.queries {
            lookup.insert((session.session_id.as_str(), q.query_id.as_str()), q);
        }
    }

    let mut results = Vec::with_capacity(strategies.len());
    for &mode in strategies {
        let rankings = replay(sessions, protocol, mode)?;
        let evaluated: Vec<&QueryRanking> = rankings.iter().filter(|r| r.informed).collect();
        if evaluated.is_empty() {
            return Err(Error::EmptyAnalysis(format!(
                "protocol {protocol} leaves no queries to evaluate"
            )));
        }
        let mut sums = vec![0.0f64; cutoffs.len()];
        let mut zero_relevant = 0usize;
        let mut per_query = Vec::with_capacity(evaluated.len());
        for r in &evaluated {
            let query = lookup
                .get(&(r.session_id.as_str(), r.query_id.as_str()))
                .expect("replayed query must come from the input sessions");
            let labels = RelevanceLabels::for_query(query);
            if !labels.has_relevant() {
                zero_relevant += 1;
            }
            let mut ndcg = Vec::with_capacity(cutoffs.len());
            for (i, &c) in cutoffs.iter().enumerate() {
                let v = ndcg_at(&r.ranking, &labels, c)?;
                sums[i] += v;
                ndcg.push(v);
            }
            per_query.push(PerQueryScore {
                session_id: r.session_id.clone(),
                query_id: r.query_id.clone(),
                ndcg,
            });
        }
        let n = evaluated.len();
        if zero_relevant == n {
            return Err(Error::EmptyAnalysis(
                "no evaluated query has a relevant document".to_string(),
            ));
        }
        results.push(StrategyResult {
            mode,
            label: mode.label(),
            mean_ndcg: sums.into_iter().map(|s| s / n as f64).collect(),
            n_queries: n,
            zero_relevant,
            per_query,
        });
    }
    Ok(EvalReport {
        protocol,
        cutoffs: cutoffs.to_vec(),
        strategies: results,
    })
}
