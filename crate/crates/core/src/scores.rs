//! Raw and min-max-normalized per-dimension score matrices.

use std::collections::BTreeSet;

use crate::dimension::{DimensionId, DIMENSION_COUNT};
use crate::error::{Error, Result};

/// Raw per-dimension relevance scores for the retrieved documents of one
/// query: one row per document, one column per [`DimensionId`] in fixed
/// order. Entries are unitless ranker outputs and may be any finite real.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    query_id: String,
    doc_ids: Vec<String>,
    rows: Vec<[f64; DIMENSION_COUNT]>,
}

impl ScoreMatrix {
    /// Validates that there is at least one document, ids are unique, one row
    /// exists per id and every entry is finite.
    pub fn new(
        query_id: impl Into<String>,
        doc_ids: Vec<String>,
        rows: Vec<[f64; DIMENSION_COUNT]>,
    ) -> Result<Self> {
        let query_id = query_id.into();
        if doc_ids.is_empty() {
            return Err(Error::invalid(format!(
                "query '{query_id}' has no documents"
            )));
        }
        if doc_ids.len() != rows.len() {
            return Err(Error::invalid(format!(
                "query '{query_id}' has {} doc ids but {} score rows",
                doc_ids.len(),
                rows.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &doc_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid(format!(
                    "query '{query_id}' has duplicate doc id '{id}'"
                )));
            }
        }
        for (id, row) in doc_ids.iter().zip(&rows) {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "query '{query_id}' doc '{id}' has a non-finite score"
                )));
            }
        }
        Ok(ScoreMatrix {
            query_id,
            doc_ids,
            rows,
        })
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn row(&self, i: usize) -> &[f64; DIMENSION_COUNT] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[[f64; DIMENSION_COUNT]] {
        &self.rows
    }

    /// Row index of `doc_id`, if retrieved for this query.
    pub fn row_of(&self, doc_id: &str) -> Option<usize> {
        self.doc_ids.iter().position(|id| id == doc_id)
    }

    pub fn score(&self, i: usize, dim: DimensionId) -> f64 {
        self.rows[i][dim.index()]
    }
}

/// Min-max normalized scores; every entry lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedScores {
    query_id: String,
    doc_ids: Vec<String>,
    rows: Vec<[f64; DIMENSION_COUNT]>,
}

impl NormalizedScores {
    /// Validates that every entry lies in `[0, 1]` and the shape is sound.
    pub fn new(
        query_id: impl Into<String>,
        doc_ids: Vec<String>,
        rows: Vec<[f64; DIMENSION_COUNT]>,
    ) -> Result<Self> {
        let query_id = query_id.into();
        for (id, row) in doc_ids.iter().zip(&rows) {
            for (dim, v) in DimensionId::ALL.into_iter().zip(row) {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::invalid(format!(
                        "query '{query_id}' doc '{id}' {dim} score {v} outside [0, 1]"
                    )));
                }
            }
        }
        let raw = ScoreMatrix::new(query_id, doc_ids, rows)?;
        Ok(NormalizedScores {
            query_id: raw.query_id,
            doc_ids: raw.doc_ids,
            rows: raw.rows,
        })
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn row(&self, i: usize) -> &[f64; DIMENSION_COUNT] {
        &self.rows[i]
    }

    pub fn row_of(&self, doc_id: &str) -> Option<usize> {
        self.doc_ids.iter().position(|id| id == doc_id)
    }

    pub fn score(&self, i: usize, dim: DimensionId) -> f64 {
        self.rows[i][dim.index()]
    }
}

/// Min-max normalize each dimension column across the query's documents:
/// `(v - min) / (max - min)`.
///
/// A column whose entries are all equal carries no ranking information for
/// this query; every entry maps to 0.5 so later projections stay neutral
/// instead of declaring all documents fully relevant or fully non-relevant.
pub fn normalize_scores(matrix: &ScoreMatrix) -> NormalizedScores {
    let n = matrix.doc_count();
    let mut rows = vec![[0.0f64; DIMENSION_COUNT]; n];
    for dim in DimensionId::ALL {
        let j = dim.index();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let v = matrix.rows[i][j];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        for (row, raw) in rows.iter_mut().zip(&matrix.rows) {
            row[j] = if hi > lo {
                (raw[j] - lo) / (hi - lo)
            } else {
                0.5
            };
        }
    }
    NormalizedScores {
        query_id: matrix.query_id.clone(),
        doc_ids: matrix.doc_ids.clone(),
        rows,
    }
}
