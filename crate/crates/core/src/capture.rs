//! Capturing per-dimension preference weights from satisfied clicks.

use std::collections::BTreeSet;

use crate::dimension::{DimensionId, DIMENSION_COUNT};
use crate::error::{Error, Result};
use crate::scores::{normalize_scores, ScoreMatrix};
use crate::vector::build_document_vectors;
use crate::weights::DimensionWeights;

/// The SAT-clicked subset of one query's retrieved documents.
///
/// A SAT click is a click judged to indicate genuine satisfaction (for web
/// logs, a long-dwell click); it is the positive feedback signal the weight
/// capture runs on. The set may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatClickSet {
    pub query_id: String,
    pub sat_doc_ids: BTreeSet<String>,
}

impl SatClickSet {
    pub fn new(query_id: impl Into<String>, sat_doc_ids: impl IntoIterator<Item = String>) -> Self {
        SatClickSet {
            query_id: query_id.into(),
            sat_doc_ids: sat_doc_ids.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sat_doc_ids.is_empty()
    }
}

/// Capture the user's dimension weights from one query's feedback.
///
/// Min-max normalizes the raw scores, builds each document's per-dimension
/// unit vectors, projects every SAT-clicked document onto each dimension's
/// relevance axis (the squared coefficient) and averages the projections
/// over the clicked documents.
///
/// With no SAT clicks the average is undefined; the uniform 1/7 vector is
/// returned instead so downstream ranking degrades to an unweighted mean.
pub fn capture_weights(matrix: &ScoreMatrix, sat: &SatClickSet) -> Result<DimensionWeights> {
    if sat.query_id != matrix.query_id() {
        return Err(Error::invalid(format!(
            "SAT clicks for query '{}' applied to matrix of query '{}'",
            sat.query_id,
            matrix.query_id()
        )));
    }
    let mut sat_rows = Vec::with_capacity(sat.sat_doc_ids.len());
    // BTreeSet iterates in doc-id order, so the summation below does not
    // depend on the caller's insertion order.
    for doc_id in &sat.sat_doc_ids {
        let row = matrix.row_of(doc_id).ok_or_else(|| {
            Error::invalid(format!(
                "SAT-clicked doc '{doc_id}' was not retrieved for query '{}'",
                matrix.query_id()
            ))
        })?;
        sat_rows.push(row);
    }
    if sat_rows.is_empty() {
        return Ok(DimensionWeights::uniform());
    }

    let norm = normalize_scores(matrix);
    let vectors = build_document_vectors(&norm);
    let mut totals = [0.0f64; DIMENSION_COUNT];
    for &i in &sat_rows {
        for dim in DimensionId::ALL {
            totals[dim.index()] += vectors[i].project(dim);
        }
    }
    let count = sat_rows.len() as f64;
    DimensionWeights::captured(totals.map(|t| t / count))
}
