//! Weighted-combination re-ranking over normalized dimension scores.

use crate::dimension::DimensionId;
use crate::scores::NormalizedScores;
use crate::weights::DimensionWeights;

/// One scored document in a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedDoc {
    pub doc_id: String,
    pub score: f64,
}

/// A re-ranked document list: combined scores non-increasing, ties broken by
/// ascending doc id so identical inputs always produce identical orders.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    query_id: String,
    entries: Vec<RankedDoc>,
}

impl RankedList {
    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn entries(&self) -> &[RankedDoc] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Document ids in rank order.
    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    fn from_scored(query_id: &str, mut entries: Vec<RankedDoc>) -> Self {
        entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        RankedList {
            query_id: query_id.to_string(),
            entries,
        }
    }
}

/// Rank documents by the dot product of `weights` with each document's
/// normalized score row.
///
/// The order is invariant under positive scaling of the weight vector, so
/// captured weights need no re-normalization before use.
pub fn weighted_rerank(norm: &NormalizedScores, weights: &DimensionWeights) -> RankedList {
    let entries = norm
        .doc_ids()
        .iter()
        .enumerate()
        .map(|(i, doc_id)| {
            let row = norm.row(i);
            let mut combined = 0.0;
            for dim in DimensionId::ALL {
                combined += weights.get(dim) * row[dim.index()];
            }
            RankedDoc {
                doc_id: doc_id.clone(),
                score: combined,
            }
        })
        .collect();
    RankedList::from_scored(norm.query_id(), entries)
}

/// Rank documents by a single dimension's normalized score.
///
/// Behaves exactly like [`weighted_rerank`] with one-hot weights on `dim`,
/// including tie handling; it is kept as a direct implementation so the two
/// routes can check each other.
pub fn single_dimension_rerank(norm: &NormalizedScores, dim: DimensionId) -> RankedList {
    let entries = norm
        .doc_ids()
        .iter()
        .enumerate()
        .map(|(i, doc_id)| RankedDoc {
            doc_id: doc_id.clone(),
            score: norm.score(i, dim),
        })
        .collect();
    RankedList::from_scored(norm.query_id(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::DIMENSION_COUNT;

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn norm(doc_ids: &[&str], rows: Vec<[f64; DIMENSION_COUNT]>) -> NormalizedScores {
        NormalizedScores::new("q", ids(doc_ids), rows).unwrap()
    }

    #[test]
    fn one_hot_weights_rank_by_that_dimension() {
        let rel = DimensionId::Reliability.index();
        let mut rows = vec![[0.2; DIMENSION_COUNT]; 3];
        rows[0][rel] = 0.1;
        rows[1][rel] = 0.9;
        rows[2][rel] = 0.5;
        let n = norm(&["a", "b", "c"], rows);
        let ranked = weighted_rerank(&n, &DimensionWeights::one_hot(DimensionId::Reliability));
        let order: Vec<&str> = ranked.doc_ids().collect();
        assert_eq!(order, vec!["b", "c", "a"]);
    }

    /// Two active dimensions with weights 0.7 / 0.3:
    /// doc a: 0.9·0.7 + 0.1·0.3 = 0.66, doc b: 0.2·0.7 + 0.8·0.3 = 0.38.
    #[test]
    fn combined_scores_are_weighted_dot_products() {
        let mut row_a = [0.0; DIMENSION_COUNT];
        let mut row_b = [0.0; DIMENSION_COUNT];
        row_a[0] = 0.9;
        row_a[1] = 0.1;
        row_b[0] = 0.2;
        row_b[1] = 0.8;
        let n = norm(&["a", "b"], vec![row_a, row_b]);
        let mut weights = [0.0; DIMENSION_COUNT];
        weights[0] = 0.7;
        weights[1] = 0.3;
        let w = DimensionWeights::captured(weights).unwrap();
        let ranked = weighted_rerank(&n, &w);
        assert_eq!(ranked.entries()[0].doc_id, "a");
        assert!((ranked.entries()[0].score - 0.66).abs() < 1e-12);
        assert_eq!(ranked.entries()[1].doc_id, "b");
        assert!((ranked.entries()[1].score - 0.38).abs() < 1e-12);
    }

    #[test]
    fn equal_weights_rank_by_unweighted_mean() {
        let rows = vec![
            [0.1, 0.9, 0.5, 0.5, 0.5, 0.5, 0.5],
            [0.8, 0.8, 0.8, 0.1, 0.1, 0.1, 0.1],
            [0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9],
        ];
        let n = norm(&["a", "b", "c"], rows.clone());
        let ranked = weighted_rerank(&n, &DimensionWeights::uniform());
        let mut by_mean: Vec<(usize, f64)> = rows
            .iter()
            .map(|r| r.iter().sum::<f64>() / DIMENSION_COUNT as f64)
            .enumerate()
            .collect();
        by_mean.sort_by(|a, b| b.1.total_cmp(&a.1));
        let expected: Vec<&str> = by_mean.iter().map(|(i, _)| ["a", "b", "c"][*i]).collect();
        let order: Vec<&str> = ranked.doc_ids().collect();
        assert_eq!(order, expected);
    }

    #[test]
    fn single_dimension_sorts_by_column() {
        let top = DimensionId::Topicality.index();
        let mut rows = vec![[0.0; DIMENSION_COUNT]; 3];
        rows[0][top] = 0.2;
        rows[1][top] = 0.9;
        rows[2][top] = 0.5;
        let n = norm(&["d1", "d2", "d3"], rows);
        let ranked = single_dimension_rerank(&n, DimensionId::Topicality);
        let order: Vec<&str> = ranked.doc_ids().collect();
        assert_eq!(order, vec!["d2", "d3", "d1"]);
    }

    #[test]
    fn ties_break_by_ascending_doc_id() {
        let n = norm(&["z", "a"], vec![[0.5; DIMENSION_COUNT]; 2]);
        let ranked = single_dimension_rerank(&n, DimensionId::Habit);
        let order: Vec<&str> = ranked.doc_ids().collect();
        assert_eq!(order, vec!["a", "z"]);
    }

    #[test]
    fn one_hot_equivalence_on_a_tied_fixture() {
        let rel = DimensionId::Reliability.index();
        let mut rows = vec![[0.3; DIMENSION_COUNT]; 4];
        rows[0][rel] = 0.5;
        rows[1][rel] = 0.5;
        rows[2][rel] = 1.0;
        rows[3][rel] = 0.0;
        let n = norm(&["w", "m", "a", "z"], rows);
        let via_weights = weighted_rerank(&n, &DimensionWeights::one_hot(DimensionId::Reliability));
        let direct = single_dimension_rerank(&n, DimensionId::Reliability);
        let a: Vec<&str> = via_weights.doc_ids().collect();
        let b: Vec<&str> = direct.doc_ids().collect();
        assert_eq!(a, b);
    }
}
