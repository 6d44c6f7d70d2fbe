//! Replay protocols that thread captured weights from one query to the next,
//! plus the top-k dimension-stability analysis.
//!
//! Two protocols are supported. Within-session replay ranks every query of a
//! session, carrying the weights captured on query `i` into query `i + 1`.
//! Cross-session replay uses only each session's last query, carrying weights
//! from one session's last query into the next session's last query (the
//! shape of per-session logs that record only the final query).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::capture::capture_weights;
use crate::dimension::DimensionId;
use crate::error::{Error, Result};
use crate::rerank::{weighted_rerank, RankedList};
use crate::scores::normalize_scores;
use crate::session::{ResolvedQuery, ResolvedSession};
use crate::weights::{DimensionWeights, WeightProvenance};

/// Weighting strategy used to rank each query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMode {
    /// Weights captured from the previous query's SAT clicks.
    Captured,
    /// Equal weights everywhere.
    Uniform,
    /// One-hot weights on a single dimension.
    Fixed(DimensionId),
}

impl RankMode {
    /// Row label used in evaluation reports.
    pub fn label(&self) -> String {
        match self {
            RankMode::Captured => "weighted_combination".to_string(),
            RankMode::Uniform => "uniform".to_string(),
            RankMode::Fixed(dim) => dim.name().to_string(),
        }
    }
}

impl fmt::Display for RankMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankMode::Captured => f.write_str("captured"),
            RankMode::Uniform => f.write_str("uniform"),
            RankMode::Fixed(dim) => write!(f, "fixed:{dim}"),
        }
    }
}

impl FromStr for RankMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "captured" => Ok(RankMode::Captured),
            "uniform" => Ok(RankMode::Uniform),
            other => match other.strip_prefix("fixed:") {
                Some(dim) => Ok(RankMode::Fixed(dim.parse()?)),
                None => Err(Error::config(format!(
                    "unknown mode '{s}' (expected captured, uniform or fixed:<dimension>)"
                ))),
            },
        }
    }
}

/// Which replay protocol threads weights between queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    WithinSession,
    CrossSession,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::WithinSession => f.write_str("within-session"),
            Protocol::CrossSession => f.write_str("cross-session"),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "within-session" => Ok(Protocol::WithinSession),
            "cross-session" => Ok(Protocol::CrossSession),
            other => Err(Error::config(format!(
                "unknown protocol '{other}' (expected within-session or cross-session)"
            ))),
        }
    }
}

/// One query's replay outcome: the weights used and the resulting ranking.
#[derive(Debug, Clone)]
pub struct QueryRanking {
    pub session_id: String,
    pub query_id: String,
    pub weights: DimensionWeights,
    pub ranking: RankedList,
    /// False for the protocol's cold-start queries (the first query of a
    /// session, or the first session's last query), where no prior feedback
    /// exists. Evaluation compares strategies on informed queries only so
    /// every mode is measured on the same query set.
    pub informed: bool,
}

fn mode_weights(mode: RankMode, previous: Option<&ResolvedQuery>) -> Result<DimensionWeights> {
    match mode {
        RankMode::Uniform => Ok(DimensionWeights::uniform()),
        RankMode::Fixed(dim) => Ok(DimensionWeights::one_hot(dim)),
        RankMode::Captured => match previous {
            None => Ok(DimensionWeights::uniform()),
            Some(prev) => {
                let captured = capture_weights(&prev.matrix, &prev.sat)?;
                // An empty SAT set yields the uniform fallback; keep its
                // provenance so the output is honest about it.
                if captured.provenance() == WeightProvenance::Captured {
                    Ok(captured.carried_forward())
                } else {
                    Ok(captured)
                }
            }
        },
    }
}

fn rank_one(
    session_id: &str,
    query: &ResolvedQuery,
    weights: DimensionWeights,
    informed: bool,
) -> QueryRanking {
    let norm = normalize_scores(&query.matrix);
    let ranking = weighted_rerank(&norm, &weights);
    QueryRanking {
        session_id: session_id.to_string(),
        query_id: query.query_id.clone(),
        weights,
        ranking,
        informed,
    }
}

/// Rank every query of one session. The first query has no prior feedback
/// and is ranked with uniform weights in captured mode.
pub fn replay_within_session(
    session: &ResolvedSession,
    mode: RankMode,
) -> Result<Vec<QueryRanking>> {
    if session.queries.is_empty() {
        return Err(Error::invalid(format!(
            "session '{}' has no queries",
            session.session_id
        )));
    }
    let mut out = Vec::with_capacity(session.queries.len());
    for (i, query) in session.queries.iter().enumerate() {
        let previous = if i > 0 {
            Some(&session.queries[i - 1])
        } else {
            None
        };
        let weights = mode_weights(mode, previous)?;
        out.push(rank_one(&session.session_id, query, weights, i > 0));
    }
    Ok(out)
}

/// Rank the last query of every session, carrying weights captured on one
/// session's last query into the next session's last query.
pub fn replay_cross_session(
    sessions: &[ResolvedSession],
    mode: RankMode,
) -> Result<Vec<QueryRanking>> {
    if sessions.is_empty() {
        return Err(Error::invalid("no sessions to replay"));
    }
    let mut out = Vec::with_capacity(sessions.len());
    let mut previous: Option<&ResolvedQuery> = None;
    for (i, session) in sessions.iter().enumerate() {
        let query = session.queries.last().ok_or_else(|| {
            Error::invalid(format!("session '{}' has no queries", session.session_id))
        })?;
        let weights = mode_weights(mode, previous)?;
        out.push(rank_one(&session.session_id, query, weights, i > 0));
        previous = Some(query);
    }
    Ok(out)
}

/// Run the chosen protocol over a batch of sessions.
pub fn replay(
    sessions: &[ResolvedSession],
    protocol: Protocol,
    mode: RankMode,
) -> Result<Vec<QueryRanking>> {
    match protocol {
        Protocol::WithinSession => {
            let mut out = Vec::new();
            for session in sessions {
                out.extend(replay_within_session(session, mode)?);
            }
            Ok(out)
        }
        Protocol::CrossSession => replay_cross_session(sessions, mode),
    }
}

/// Per-session outcome of the stability analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityStatus {
    /// Some dimension from the first query's top-k stayed in the top-k of
    /// every query.
    Stable,
    Unstable,
    /// Fewer than two queries, or some query had no SAT clicks.
    Excluded,
}

impl fmt::Display for StabilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityStatus::Stable => f.write_str("stable"),
            StabilityStatus::Unstable => f.write_str("unstable"),
            StabilityStatus::Excluded => f.write_str("excluded"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionStability {
    pub session_id: String,
    pub status: StabilityStatus,
}

/// Result of [`stability_analysis`].
#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Stable sessions over eligible sessions.
    pub fraction_stable: f64,
    pub stable_sessions: usize,
    pub eligible_sessions: usize,
    pub excluded_sessions: usize,
    pub top_k: usize,
    pub per_session: Vec<SessionStability>,
}

/// Measure how often a session keeps at least one of its initial top-k
/// dimensions in the top-k for every query.
///
/// Each query's dimension ranking comes from the weights captured on that
/// query's own SAT clicks, with ties broken by the fixed dimension order.
/// Sessions with fewer than two queries, or with any query lacking SAT
/// clicks (whose uniform fallback would make the top-k arbitrary), are
/// excluded from the denominator and reported as such.
pub fn stability_analysis(sessions: &[ResolvedSession], top_k: usize) -> Result<StabilityReport> {
    if !(1..=DimensionId::ALL.len()).contains(&top_k) {
        return Err(Error::invalid(format!(
            "top_k must be in 1..=7, got {top_k}"
        )));
    }
    let mut per_session = Vec::with_capacity(sessions.len());
    let mut stable = 0usize;
    let mut eligible = 0usize;
    for session in sessions {
        let usable =
            session.queries.len() >= 2 && session.queries.iter().all(|q| !q.sat.is_empty());
        if !usable {
            per_session.push(SessionStability {
                session_id: session.session_id.clone(),
                status: StabilityStatus::Excluded,
            });
            continue;
        }
        eligible += 1;
        let mut top_sets: Vec<BTreeSet<DimensionId>> = Vec::with_capacity(session.queries.len());
        for q in &session.queries {
            let weights = capture_weights(&q.matrix, &q.sat)?;
            let ranked = weights.ranked_dimensions();
            top_sets.push(ranked[..top_k].iter().copied().collect());
        }
        let first = &top_sets[0];
        let is_stable = first
            .iter()
            .any(|dim| top_sets[1..].iter().all(|set| set.contains(dim)));
        if is_stable {
            stable += 1;
        }
        per_session.push(SessionStability {
            session_id: session.session_id.clone(),
            status: if is_stable {
                StabilityStatus::Stable
            } else {
                StabilityStatus::Unstable
            },
        });
    }
    if eligible == 0 {
        return Err(Error::EmptyAnalysis(
            "no session has two or more queries with SAT clicks throughout".to_string(),
        ));
    }
    Ok(StabilityReport {
        fraction_stable: stable as f64 / eligible as f64,
        stable_sessions: stable,
        eligible_sessions: eligible,
        excluded_sessions: sessions.len() - eligible,
        top_k,
        per_session,
    })
}
