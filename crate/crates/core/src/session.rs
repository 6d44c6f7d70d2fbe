//! Session log data model, JSONL ingestion and score resolution.
//!
//! The wire format is one JSON object per line, UTF-8:
//!
//! ```json
//! {"session_id": "s1", "query_id": "q1", "ts": 0, "query": "visa rules",
//!  "docs": [{"doc_id": "d1", "host": "gov.example", "title": "…",
//!            "body_len": 740, "sentence_avg_len": 14.5, "publish_rank": 2,
//!            "text": "…", "scores": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]}],
//!  "sat_clicks": ["d1"], "grades": {"d1": 2}}
//! ```
//!
//! `text` and `scores` are optional. When every doc of a query carries
//! `scores` (seven reals in dimension order) the query is pre-scored and the
//! scorer stack is bypassed; mixing scored and unscored docs in one query is
//! an ingestion error. Lines are grouped into sessions by `session_id` in
//! first-appearance order and ordered by `ts` within each session.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capture::SatClickSet;
use crate::dimension::DIMENSION_COUNT;
use crate::error::{Error, Result};
use crate::scorers::{build_score_matrix, tokenize, DocumentRecord, ScorerSet, UserProfile};
use crate::scores::ScoreMatrix;

/// One query of a session: retrieved documents, optional pre-computed score
/// rows, SAT clicks and optional graded relevance.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub query_id: String,
    /// Ordering key within the session.
    pub ts: i64,
    pub query_text: String,
    pub docs: Vec<DocumentRecord>,
    /// Pre-computed raw score rows, one per doc in `docs` order. `Some`
    /// switches the query to passthrough mode.
    pub scores: Option<Vec<[f64; DIMENSION_COUNT]>>,
    pub sat_doc_ids: BTreeSet<String>,
    pub grades: Option<BTreeMap<String, u32>>,
}

impl QueryRecord {
    pub fn is_pre_scored(&self) -> bool {
        self.scores.is_some()
    }
}

/// An ordered search session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub session_id: String,
    pub queries: Vec<QueryRecord>,
    /// Owning user, when known. Not part of the wire format; available for
    /// programmatic callers that track identity across sessions.
    pub user_id: Option<String>,
}

/// A query reduced to what replay needs: its raw score matrix plus feedback.
#[derive(Debug, Clone)]
pub struct ResolvedQuery {
    pub query_id: String,
    pub matrix: ScoreMatrix,
    pub sat: SatClickSet,
    pub grades: Option<BTreeMap<String, u32>>,
}

/// A session whose queries all have score matrices.
#[derive(Debug, Clone)]
pub struct ResolvedSession {
    pub session_id: String,
    pub queries: Vec<ResolvedQuery>,
}

impl SessionLog {
    /// Resolve every query to a raw score matrix, running the scorers for
    /// queries that are not pre-scored.
    pub fn resolve(&self, scorers: &ScorerSet, profile: &UserProfile) -> Result<ResolvedSession> {
        if self.queries.is_empty() {
            return Err(Error::invalid(format!(
                "session '{}' has no queries",
                self.session_id
            )));
        }
        let mut queries = Vec::with_capacity(self.queries.len());
        for q in &self.queries {
            let matrix = match &q.scores {
                Some(rows) => {
                    let doc_ids = q.docs.iter().map(|d| d.doc_id.clone()).collect();
                    ScoreMatrix::new(q.query_id.clone(), doc_ids, rows.clone())?
                }
                None => {
                    let terms = tokenize(&q.query_text);
                    build_score_matrix(&q.query_id, &terms, &q.docs, profile, scorers)?
                }
            };
            for sat_id in &q.sat_doc_ids {
                if matrix.row_of(sat_id).is_none() {
                    return Err(Error::invalid(format!(
                        "query '{}': SAT click on unretrieved doc '{sat_id}'",
                        q.query_id
                    )));
                }
            }
            queries.push(ResolvedQuery {
                query_id: q.query_id.clone(),
                matrix,
                sat: SatClickSet::new(q.query_id.clone(), q.sat_doc_ids.iter().cloned()),
                grades: q.grades.clone(),
            });
        }
        Ok(ResolvedSession {
            session_id: self.session_id.clone(),
            queries,
        })
    }
}

/// Resolve a batch of sessions with the same scorer stack.
pub fn resolve_sessions(
    sessions: &[SessionLog],
    scorers: &ScorerSet,
    profile: &UserProfile,
) -> Result<Vec<ResolvedSession>> {
    sessions
        .iter()
        .map(|s| s.resolve(scorers, profile))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogLine {
    session_id: String,
    query_id: String,
    ts: i64,
    query: String,
    docs: Vec<LogDoc>,
    sat_clicks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grades: Option<BTreeMap<String, u32>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogDoc {
    doc_id: String,
    host: String,
    title: String,
    body_len: u64,
    sentence_avg_len: f64,
    publish_rank: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scores: Option<Vec<f64>>,
}

fn query_from_line(line_no: usize, line: LogLine) -> Result<(String, QueryRecord)> {
    if line.docs.is_empty() {
        return Err(Error::parse(
            line_no,
            format!("query '{}' has no documents", line.query_id),
        ));
    }
    let mut seen = BTreeSet::new();
    for d in &line.docs {
        if !seen.insert(d.doc_id.as_str()) {
            return Err(Error::parse(
                line_no,
                format!("duplicate doc id '{}'", d.doc_id),
            ));
        }
        if !d.sentence_avg_len.is_finite() || d.sentence_avg_len < 0.0 {
            return Err(Error::parse(
                line_no,
                format!("doc '{}' has a bad sentence_avg_len", d.doc_id),
            ));
        }
    }

    let scored = line.docs.iter().filter(|d| d.scores.is_some()).count();
    let scores = if scored == line.docs.len() {
        let mut rows = Vec::with_capacity(line.docs.len());
        for d in &line.docs {
            let s = d.scores.as_ref().unwrap();
            if s.len() != DIMENSION_COUNT {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "doc '{}' has {} scores, expected {DIMENSION_COUNT}",
                        d.doc_id,
                        s.len()
                    ),
                ));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(
                    line_no,
                    format!("doc '{}' has a non-finite score", d.doc_id),
                ));
            }
            let mut row = [0.0; DIMENSION_COUNT];
            row.copy_from_slice(s);
            rows.push(row);
        }
        Some(rows)
    } else if scored == 0 {
        None
    } else {
        return Err(Error::parse(
            line_no,
            format!(
                "query '{}' mixes scored and unscored docs ({scored} of {})",
                line.query_id,
                line.docs.len()
            ),
        ));
    };

    for sat in &line.sat_clicks {
        if !seen.contains(sat.as_str()) {
            return Err(Error::parse(
                line_no,
                format!("sat click on unknown doc '{sat}'"),
            ));
        }
    }
    if let Some(grades) = &line.grades {
        for doc_id in grades.keys() {
            if !seen.contains(doc_id.as_str()) {
                return Err(Error::parse(
                    line_no,
                    format!("grade for unknown doc '{doc_id}'"),
                ));
            }
        }
    }

    let docs = line
        .docs
        .into_iter()
        .map(|d| DocumentRecord {
            doc_id: d.doc_id,
            url_host: d.host,
            title: d.title,
            body_text: d.text.unwrap_or_default(),
            length_tokens: d.body_len,
            sentence_avg_len: d.sentence_avg_len,
            publish_rank: d.publish_rank,
        })
        .collect();

    Ok((
        line.session_id,
        QueryRecord {
            query_id: line.query_id,
            ts: line.ts,
            query_text: line.query,
            docs,
            scores,
            sat_doc_ids: line.sat_clicks.into_iter().collect(),
            grades: line.grades,
        },
    ))
}

/// Parse a JSONL session log. Blank lines are skipped; any malformed line
/// fails with its 1-based line number.
pub fn read_sessions(reader: impl BufRead) -> Result<Vec<SessionLog>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_id: BTreeMap<String, Vec<QueryRecord>> = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let parsed: LogLine =
            serde_json::from_str(&text).map_err(|e| Error::parse(line_no, e.to_string()))?;
        let (session_id, query) = query_from_line(line_no, parsed)?;
        if !by_id.contains_key(&session_id) {
            order.push(session_id.clone());
        }
        by_id.entry(session_id).or_default().push(query);
    }
    let mut sessions = Vec::with_capacity(order.len());
    for session_id in order {
        let mut queries = by_id.remove(&session_id).unwrap();
        // Stable: equal timestamps keep file order.
        queries.sort_by_key(|q| q.ts);
        sessions.push(SessionLog {
            session_id,
            queries,
            user_id: None,
        });
    }
    Ok(sessions)
}

pub fn read_sessions_from_path(path: impl AsRef<Path>) -> Result<Vec<SessionLog>> {
    let file = File::open(path)?;
    read_sessions(BufReader::new(file))
}

/// Serialize sessions to the JSONL wire format, one query per line, in
/// session and query order.
pub fn write_sessions(sessions: &[SessionLog], mut writer: impl Write) -> Result<()> {
    for session in sessions {
        for q in &session.queries {
            let docs = q
                .docs
                .iter()
                .enumerate()
                .map(|(i, d)| LogDoc {
                    doc_id: d.doc_id.clone(),
                    host: d.url_host.clone(),
                    title: d.title.clone(),
                    body_len: d.length_tokens,
                    sentence_avg_len: d.sentence_avg_len,
                    publish_rank: d.publish_rank,
                    text: if d.body_text.is_empty() {
                        None
                    } else {
                        Some(d.body_text.clone())
                    },
                    scores: q.scores.as_ref().map(|rows| rows[i].to_vec()),
                })
                .collect();
            let line = LogLine {
                session_id: session.session_id.clone(),
                query_id: q.query_id.clone(),
                ts: q.ts,
                query: q.query_text.clone(),
                docs,
                sat_clicks: q.sat_doc_ids.iter().cloned().collect(),
                grades: q.grades.clone(),
            };
            serde_json::to_writer(&mut writer, &line)
                .map_err(|e| Error::invalid(format!("serialize failed: {e}")))?;
            writer.write_all(b"\n")?;
        }
    }
    Ok(())
}
