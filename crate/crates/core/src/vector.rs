//! Unit-circle document representations, one per relevance dimension.
//!
//! A document's normalized score `s` for a dimension becomes the pair
//! `(alpha, beta) = (sqrt(s), sqrt(1 - s))`: the coefficients of the
//! document vector over that dimension's relevance / non-relevance axes.
//! Squaring the projection onto the relevance axis recovers `s`.

use crate::dimension::{DimensionId, DIMENSION_COUNT};
use crate::scores::NormalizedScores;

/// Superposition coefficients of one document: a unit vector per dimension,
/// with `alpha² + beta² = 1` and `alpha, beta ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentVector {
    doc_id: String,
    coeffs: [(f64, f64); DIMENSION_COUNT],
}

impl DocumentVector {
    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    /// Coefficient along the relevance axis of `dim`.
    pub fn alpha(&self, dim: DimensionId) -> f64 {
        self.coeffs[dim.index()].0
    }

    /// Coefficient along the non-relevance axis of `dim`.
    pub fn beta(&self, dim: DimensionId) -> f64 {
        self.coeffs[dim.index()].1
    }

    /// Squared projection onto the relevance axis of `dim`.
    ///
    /// Recovers the normalized score the vector was built from (up to
    /// floating-point round trip, within 1e-12).
    pub fn project(&self, dim: DimensionId) -> f64 {
        let a = self.alpha(dim);
        a * a
    }
}

/// Build one [`DocumentVector`] per document, in input order.
pub fn build_document_vectors(norm: &NormalizedScores) -> Vec<DocumentVector> {
    norm.doc_ids()
        .iter()
        .enumerate()
        .map(|(i, doc_id)| {
            let row = norm.row(i);
            let mut coeffs = [(0.0, 0.0); DIMENSION_COUNT];
            for (j, coeff) in coeffs.iter_mut().enumerate() {
                let s = row[j];
                *coeff = (s.sqrt(), (1.0 - s).sqrt());
            }
            DocumentVector {
                doc_id: doc_id.clone(),
                coeffs,
            }
        })
        .collect()
}
