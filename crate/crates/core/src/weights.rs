//! Per-dimension preference weight vectors.

use serde::Serialize;

use crate::dimension::{DimensionId, DIMENSION_COUNT};
use crate::error::{Error, Result};

/// How a weight vector came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightProvenance {
    /// Averaged projections of a query's SAT-clicked documents.
    Captured,
    /// The 1/7 fallback used when no feedback exists.
    Uniform,
    /// Captured on an earlier query and applied to a later one.
    CarriedForward,
    /// A one-hot vector selecting a single dimension.
    Fixed,
}

/// A 7-component preference vector with each weight in `[0, 1]`.
///
/// Weights are kept as raw averages rather than re-normalized to sum to one:
/// ranking order is invariant under positive scaling of the whole vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionWeights {
    weights: [f64; DIMENSION_COUNT],
    provenance: WeightProvenance,
}

impl DimensionWeights {
    /// Equal weight 1/7 on every dimension.
    pub fn uniform() -> Self {
        DimensionWeights {
            weights: [1.0 / DIMENSION_COUNT as f64; DIMENSION_COUNT],
            provenance: WeightProvenance::Uniform,
        }
    }

    /// Weight 1.0 on `dim` and 0.0 elsewhere.
    pub fn one_hot(dim: DimensionId) -> Self {
        let mut weights = [0.0; DIMENSION_COUNT];
        weights[dim.index()] = 1.0;
        DimensionWeights {
            weights,
            provenance: WeightProvenance::Fixed,
        }
    }

    /// A captured weight vector; every component must lie in `[0, 1]`.
    pub fn captured(weights: [f64; DIMENSION_COUNT]) -> Result<Self> {
        for (dim, w) in DimensionId::ALL.into_iter().zip(&weights) {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::invalid(format!(
                    "captured weight for {dim} is {w}, outside [0, 1]"
                )));
            }
        }
        Ok(DimensionWeights {
            weights,
            provenance: WeightProvenance::Captured,
        })
    }

    /// The same values re-labeled as carried over from an earlier query.
    pub fn carried_forward(&self) -> Self {
        DimensionWeights {
            weights: self.weights,
            provenance: WeightProvenance::CarriedForward,
        }
    }

    pub fn get(&self, dim: DimensionId) -> f64 {
        self.weights[dim.index()]
    }

    /// All seven weights in [`DimensionId::ALL`] order.
    pub fn values(&self) -> &[f64; DIMENSION_COUNT] {
        &self.weights
    }

    pub fn provenance(&self) -> WeightProvenance {
        self.provenance
    }

    /// Dimensions ordered by descending weight. Ties keep the fixed
    /// alphabetical dimension order so analyses reproduce across runs.
    pub fn ranked_dimensions(&self) -> [DimensionId; DIMENSION_COUNT] {
        let mut dims = DimensionId::ALL;
        // Stable sort: equal weights preserve the alphabetical order of ALL.
        dims.sort_by(|a, b| self.get(*b).total_cmp(&self.get(*a)));
        dims
    }
}
